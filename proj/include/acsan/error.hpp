#ifndef ACSAN_ERROR_HPP
#define ACSAN_ERROR_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace acsan {

/// Base of every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SortError : public Error {
public:
    using Error::Error;
};

class ArityError : public Error {
public:
    using Error::Error;
};

class UnboundVariable : public Error {
public:
    using Error::Error;
};

class EmptyPrincipalSet : public Error {
public:
    EmptyPrincipalSet() : Error("principal set is empty") {}
};

/// Raised when a fixpoint is still growing after the configured number of passes.
class BudgetExceeded : public Error {
public:
    using Error::Error;
};

class NotDerivable : public Error {
public:
    using Error::Error;
};

class DisabledEvent : public Error {
public:
    DisabledEvent(std::string event, const std::string& what)
        : Error(what), event_(std::move(event)) {}
    const std::string& event() const noexcept { return event_; }

private:
    std::string event_;
};

class CyclicOrder : public Error {
public:
    CyclicOrder(const std::string& what, std::vector<std::size_t> cycle) : Error(what), cycle_(std::move(cycle)) {}

    /// Closed walk a0 < a1 < ... < a0 of element indices.
    const std::vector<std::size_t>& cycle() const noexcept { return cycle_; }

private:
    std::vector<std::size_t> cycle_;
};

class UnknownEvent : public Error {
public:
    using Error::Error;
};

class TooLarge : public Error {
public:
    using Error::Error;
};

class CompatViolation : public Error {
public:
    using Error::Error;
};

} // namespace acsan

#endif
