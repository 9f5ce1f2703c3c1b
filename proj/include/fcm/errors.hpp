#pragma once

#include <stdexcept>
#include <string>

namespace fcm {

// Thrown when a request would exceed a configured resource cap
// (e.g. dense assembly of a Hilbert space beyond the dense limit).
struct resource_limit_error : std::runtime_error {
    explicit resource_limit_error(const std::string& what) : std::runtime_error(what) {}
};

// Thrown when an iterative solver fails to reach its tolerance.
// Carries the best residual seen so the caller can report it.
struct convergence_error : std::runtime_error {
    convergence_error(const std::string& what, double residual)
        : std::runtime_error(what), residual(residual) {}
    double residual;
};

// Thrown when a tie-break would be arbitrary (e.g. degenerate top Schmidt
// value at a site when picking a mean-field basis).
struct degeneracy_error : std::runtime_error {
    degeneracy_error(const std::string& what, int site)
        : std::runtime_error(what), site(site) {}
    int site;
};

// Thrown when a proven-theorem precondition fails on concrete data
// (e.g. projection weight loss >= 1/2 in an effective-Hamiltonian step).
struct precondition_error : std::runtime_error {
    explicit precondition_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace fcm
