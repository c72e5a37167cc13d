#pragma once

#include <string>

#include "treebo/grid.hpp"
#include "treebo/tree_model.hpp"
#include "treebo/uncertainty.hpp"

namespace treebo {

enum class Mode {
    Explore,         // prediction - kappa * clamped min distance (LCB)
    Penalty,         // prediction + kappa * min distance to data points
    ClusterPenalty,  // prediction + kappa * min distance to cluster centers
};

std::string to_string(Mode m);
Mode mode_from_string(const std::string& s);
bool is_penalty(Mode m);

/// One fully assembled acquisition-minimization instance.
struct AcquisitionProblem {
    Mode mode = Mode::Explore;
    Metric metric = Metric::SquaredEuclidean;
    TreeEnsemble ensemble;
    IntervalGrid grid;
    ReferenceSet refs;
    Standardizer standardizer;
    double kappa = 1.96;
    double alpha_limit = 0.0;  // explore mode: upper clamp on the distance term
    double big_m = 0.0;        // penalty modes: derived constant for the MIP export

    /// Checks the cross-field invariants (reference kind vs mode, finite
    /// hyperparameters, matching dimensions). Throws std::invalid_argument.
    void validate() const;
};

/// Acquisition value at x. Explore mode subtracts the clamped exploration
/// bonus; penalty modes add the unclamped distance penalty.
double evaluate_acquisition(const AcquisitionProblem& problem, std::span<const double> x);

}  // namespace treebo
