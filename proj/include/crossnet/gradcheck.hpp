#pragma once

#include <functional>
#include <string>
#include <vector>

#include "crossnet/layers.hpp"

namespace crossnet {

/// Outcome of a central-finite-difference sweep. The error measure is
/// |fd - analytic| / max(floor, |fd|, |analytic|); the floor keeps
/// near-zero gradients from amplifying the O(eps/h) noise of the
/// difference quotient into spurious relative error.
struct FdReport {
    double max_err = 0.0;
    std::string worst;

    bool passed(double tol = 1e-5) const { return max_err < tol; }
    void merge(const FdReport& other);
};

struct FdSettings {
    double step = 1e-6;
    double floor = 1e-2;
};

/// Compares analytic grads already accumulated in `params` against central
/// differences of `scalar_fn` (which must recompute the scalar from the
/// current parameter values, without touching grads).
FdReport fd_check_params(const std::vector<Param*>& params, const std::function<double()>& scalar_fn,
                         const FdSettings& settings = {});

/// Same check for a gradient with respect to a plain vector input.
FdReport fd_check_vector(Vector& x, const Vector& analytic, const std::function<double()>& scalar_fn,
                         const std::string& label, const FdSettings& settings = {});

/// The full sweep the `gradcheck` command runs: every layer kind and every
/// architecture/cross-kind combination, `instances` random instances each.
struct GradCheckSummary {
    FdReport report;
    std::size_t checks_run = 0;
    std::vector<std::string> lines;  // one human-readable line per group
};

GradCheckSummary run_gradient_suite(std::uint64_t seed, std::size_t instances = 20, double tol = 1e-5);

}  // namespace crossnet
