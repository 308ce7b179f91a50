#pragma once

#include <stdexcept>
#include <string>

namespace qcs {

/// Argument outside the mathematical domain of a function.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Evaluation requested exactly at a pole (T-matrix pole, A0 resonance).
class PoleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A root that must exist for the requested parameters does not.
class NoRootError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Quantity is infinite at exact p-wave resonance (1/a1 == 0).
class ResonanceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bound level lies outside the region where the potential is valid.
class LevelNotSupported : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerov grid does not resolve the local wavelength.
class GridTooCoarse : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A fit or estimate needs more data points than supplied.
class InsufficientLevels : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// No classical turning point exists for the requested energy.
class NoTurningPoint : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_domain(bool ok, const char* what)
{
    if (!ok) {
        throw DomainError(what);
    }
}

} // namespace detail
} // namespace qcs
