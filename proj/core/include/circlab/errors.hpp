#pragma once

#include <stdexcept>
#include <string>

namespace circlab {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad user-supplied settings; surfaced by the CLI as exit status 2.
class ConfigError : public Error {
public:
    using Error::Error;
};

// An enumeration or oracle cap would be exceeded.
class CapacityError : public Error {
public:
    CapacityError(const std::string& cap, const std::string& what)
        : Error(what + " (cap: " + cap + ")"), cap_(cap) {}
    const std::string& cap() const noexcept { return cap_; }

private:
    std::string cap_;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class LookupError : public Error {
public:
    using Error::Error;
};

class KindError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace circlab
