#include "treebo/acquisition.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace treebo {

std::string to_string(Mode m) {
    switch (m) {
        case Mode::Explore: return "explore";
        case Mode::Penalty: return "penalty";
        case Mode::ClusterPenalty: return "cluster-penalty";
    }
    return "?";
}

Mode mode_from_string(const std::string& s) {
    if (s == "explore") return Mode::Explore;
    if (s == "penalty") return Mode::Penalty;
    if (s == "cluster-penalty" || s == "cluster_penalty") return Mode::ClusterPenalty;
    throw std::invalid_argument("unknown mode '" + s +
                                "' (use explore, penalty, cluster-penalty)");
}

bool is_penalty(Mode m) { return m != Mode::Explore; }

void AcquisitionProblem::validate() const {
    const int n = ensemble.num_features;
    if (grid.num_dims() != n || refs.dim() != n || standardizer.dim() != n)
        throw std::invalid_argument("acquisition problem: dimension mismatch");
    if (refs.size() == 0) throw std::invalid_argument("acquisition problem: empty reference set");
    const bool cluster_refs = refs.kind() == ReferenceSet::Kind::Cluster;
    if (cluster_refs != (mode == Mode::ClusterPenalty))
        throw std::invalid_argument(
            "acquisition problem: cluster references require cluster-penalty mode and vice versa");
    if (!(kappa >= 0.0)) throw std::invalid_argument("acquisition problem: kappa must be >= 0");
    if (mode == Mode::Explore && !std::isfinite(alpha_limit))
        throw std::invalid_argument("acquisition problem: alpha_limit must be finite in explore mode");
    if (alpha_limit < 0.0)
        throw std::invalid_argument("acquisition problem: alpha_limit must be >= 0");
}

double evaluate_acquisition(const AcquisitionProblem& problem, std::span<const double> x) {
    for (int i = 0; i < problem.grid.num_dims(); ++i)
        if (x[i] < problem.grid.dim(i).lower || x[i] > problem.grid.dim(i).upper)
            throw std::invalid_argument("evaluate_acquisition: point outside the grid bounds");
    const double mu = predict(problem.ensemble, x);
    if (problem.kappa == 0.0) return mu;
    const double dist = min_distance(x, problem.refs, problem.standardizer, problem.metric);
    if (problem.mode == Mode::Explore)
        return mu - problem.kappa * std::min(problem.alpha_limit, dist);
    return mu + problem.kappa * dist;
}

}  // namespace treebo
