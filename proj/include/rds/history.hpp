#pragma once

#include <deque>
#include <functional>
#include <limits>
#include <stdexcept>
#include <vector>

#include "rds/linalg.hpp"

namespace rds {

struct QueryOutOfWindow : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct NonMonotoneTime : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct HistNode {
    double t = 0.0;
    Vec x;
    Vec dx;
};

struct HistSegment {
    std::vector<HistNode> nodes;
    double t_begin() const { return nodes.front().t; }
    double t_end() const { return nodes.back().t; }
};

// Initial condition phi on [-h, 0]: a sampler plus declared jump offsets
// strictly inside (-h, 0). Piecewise continuous between jumps.
struct InitialCondition {
    int dim = 0;
    std::function<Vec(double)> sampler;  // theta in [-h, 0]
    std::vector<double> jump_offsets;    // ascending, in (-h, 0)

    static InitialCondition constant(const Vec& c);
};

// Piecewise-smooth state record over a sliding window. Segments tile the
// window; interpolation is cubic Hermite on (state, derivative) node pairs
// and never crosses a segment boundary. Queries at a registered jump time
// return the left limit.
class HistoryFunction {
public:
    HistoryFunction() = default;
    HistoryFunction(int dim, double span,
                    double retention = std::numeric_limits<double>::infinity());

    // Samples phi into node form at resolution dt ending at t0; derivatives
    // by finite differences of the sampler within each continuous piece.
    static HistoryFunction from_initial(const InitialCondition& phi, double h, double t0,
                                        double dt,
                                        double retention = std::numeric_limits<double>::infinity());

    // First node time must equal the current window end (any start on an
    // empty history). is_jump_start registers the first node time as a jump
    // whose right limit is the first node's state.
    void push_segment(std::vector<HistNode> nodes, bool is_jump_start = false);

    Vec evaluate(double t) const;        // left limit at jumps
    Vec evaluate_right(double t) const;  // right limit at jumps

    int dim() const { return n_; }
    double span() const { return span_; }
    double t_now() const;
    double earliest() const;                              // oldest retained time
    double window_start() const { return t_now() - span_; }
    bool empty() const { return segments_.empty(); }

    const std::vector<double>& jump_times() const { return jumps_; }
    const std::deque<HistSegment>& segments() const { return segments_; }

    // Node and jump times in [a, b], ascending, deduplicated.
    std::vector<double> breakpoints(double a, double b) const;

    // sup of ||x|| over [a, b], from node states plus interval midpoints.
    double sup_norm(double a, double b) const;

private:
    const HistSegment& segment_for(double t, bool prefer_right) const;
    void prune();

    int n_ = 0;
    double span_ = 0.0;
    double retention_ = 0.0;
    std::deque<HistSegment> segments_;
    std::vector<double> jumps_;
};

// Hermite interpolation between two nodes; exact at node times.
Vec hermite_eval(const HistNode& a, const HistNode& b, double t);

}  // namespace rds
