#include "rds/history.hpp"

#include <algorithm>
#include <cmath>

namespace rds {

namespace {
double time_tol(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }
}  // namespace

InitialCondition InitialCondition::constant(const Vec& c) {
    InitialCondition phi;
    phi.dim = static_cast<int>(c.size());
    phi.sampler = [c](double) { return c; };
    return phi;
}

Vec hermite_eval(const HistNode& a, const HistNode& b, double t) {
    const double h = b.t - a.t;
    const double s = (t - a.t) / h;
    const double s2 = s * s, s3 = s2 * s;
    const double h00 = 2 * s3 - 3 * s2 + 1;
    const double h10 = s3 - 2 * s2 + s;
    const double h01 = -2 * s3 + 3 * s2;
    const double h11 = s3 - s2;
    Vec out(a.x.size());
    for (size_t i = 0; i < out.size(); ++i)
        out[i] = h00 * a.x[i] + h10 * h * a.dx[i] + h01 * b.x[i] + h11 * h * b.dx[i];
    return out;
}

HistoryFunction::HistoryFunction(int dim, double span, double retention)
    : n_(dim), span_(span), retention_(std::max(retention, span)) {
    if (dim <= 0 || span <= 0.0) throw DimensionMismatch("HistoryFunction: bad dim or span");
}

HistoryFunction HistoryFunction::from_initial(const InitialCondition& phi, double h, double t0,
                                              double dt, double retention) {
    HistoryFunction hist(phi.dim, h, retention);
    std::vector<double> bounds{-h};
    for (double j : phi.jump_offsets) bounds.push_back(j);
    bounds.push_back(0.0);

    for (size_t p = 0; p + 1 < bounds.size(); ++p) {
        const double a = bounds[p], b = bounds[p + 1];
        const double len = b - a;
        const int m = std::max(1, static_cast<int>(std::ceil(len / dt - 1e-9)));
        const double shift = 1e-7 * std::min(len, dt);
        const bool jump_start = p > 0;

        auto sample = [&](double theta) {
            // sampler treated as left-continuous; nudge right at a jump start
            double q = theta;
            if (jump_start && theta <= a + shift) q = a + shift;
            return phi.sampler(q);
        };
        auto deriv = [&](double theta) {
            double d = std::min(shift, 0.25 * len);
            double lo = std::max(theta - d, a + (jump_start ? shift : 0.0));
            double hi = std::min(theta + d, b);
            Vec xl = sample(lo), xh = sample(hi);
            Vec g(xl.size(), 0.0);
            if (hi > lo)
                for (size_t i = 0; i < g.size(); ++i) g[i] = (xh[i] - xl[i]) / (hi - lo);
            return g;
        };

        std::vector<HistNode> nodes;
        nodes.reserve(m + 1);
        for (int k = 0; k <= m; ++k) {
            double theta = (k == m) ? b : a + len * k / m;
            nodes.push_back({t0 + theta, sample(theta), deriv(theta)});
        }
        hist.push_segment(std::move(nodes), jump_start);
    }
    return hist;
}

void HistoryFunction::push_segment(std::vector<HistNode> nodes, bool is_jump_start) {
    if (nodes.empty()) throw NonMonotoneTime("push_segment: empty node list");
    for (size_t i = 0; i < nodes.size(); ++i) {
        if (static_cast<int>(nodes[i].x.size()) != n_ ||
            static_cast<int>(nodes[i].dx.size()) != n_)
            throw DimensionMismatch("push_segment: node dimension");
        for (double v : nodes[i].x)
            if (!std::isfinite(v)) throw NonMonotoneTime("push_segment: non-finite state");
        if (i > 0 && nodes[i].t <= nodes[i - 1].t)
            throw NonMonotoneTime("push_segment: node times must strictly increase");
    }
    if (!segments_.empty()) {
        double end = t_now();
        if (std::abs(nodes.front().t - end) > time_tol(end))
            throw NonMonotoneTime("push_segment: segment must start at window end");
        nodes.front().t = end;  // snap to exact boundary
    }
    if (is_jump_start) jumps_.push_back(nodes.front().t);
    segments_.push_back(HistSegment{std::move(nodes)});
    prune();
}

double HistoryFunction::t_now() const {
    if (segments_.empty()) throw QueryOutOfWindow("history is empty");
    return segments_.back().t_end();
}

double HistoryFunction::earliest() const {
    if (segments_.empty()) throw QueryOutOfWindow("history is empty");
    return segments_.front().t_begin();
}

void HistoryFunction::prune() {
    const double cutoff = t_now() - retention_;
    while (segments_.size() > 1 && segments_.front().t_end() < cutoff - time_tol(cutoff))
        segments_.pop_front();
    const double oldest = earliest();
    while (!jumps_.empty() && jumps_.front() < oldest - time_tol(oldest))
        jumps_.erase(jumps_.begin());
}

const HistSegment& HistoryFunction::segment_for(double t, bool prefer_right) const {
    if (segments_.empty()) throw QueryOutOfWindow("history is empty");
    const double tol = time_tol(t);
    if (t < earliest() - tol || t > t_now() + tol)
        throw QueryOutOfWindow("query time outside history window");

    if (!prefer_right) {
        // earliest segment whose end covers t -> left limit at boundaries
        auto it = std::partition_point(segments_.begin(), segments_.end(),
                                       [&](const HistSegment& s) { return s.t_end() < t - tol; });
        if (it == segments_.end()) it = std::prev(segments_.end());
        return *it;
    }
    // latest segment starting at or before t -> right limit at boundaries
    auto it = std::partition_point(segments_.begin(), segments_.end(),
                                   [&](const HistSegment& s) { return s.t_begin() <= t + tol; });
    if (it == segments_.begin()) return segments_.front();
    return *std::prev(it);
}

static Vec eval_in_segment(const HistSegment& seg, double t) {
    const auto& nodes = seg.nodes;
    const double tol = time_tol(t);
    auto it = std::partition_point(nodes.begin(), nodes.end(),
                                   [&](const HistNode& nd) { return nd.t < t - tol; });
    if (it != nodes.end() && std::abs(it->t - t) <= tol) return it->x;
    if (it == nodes.begin()) return nodes.front().x;
    if (it == nodes.end()) return nodes.back().x;
    return hermite_eval(*std::prev(it), *it, t);
}

Vec HistoryFunction::evaluate(double t) const { return eval_in_segment(segment_for(t, false), t); }

Vec HistoryFunction::evaluate_right(double t) const {
    return eval_in_segment(segment_for(t, true), t);
}

std::vector<double> HistoryFunction::breakpoints(double a, double b) const {
    std::vector<double> out{a, b};
    for (const auto& seg : segments_) {
        if (seg.t_end() < a || seg.t_begin() > b) continue;
        for (const auto& nd : seg.nodes)
            if (nd.t > a && nd.t < b) out.push_back(nd.t);
    }
    for (double j : jumps_)
        if (j > a && j < b) out.push_back(j);
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end(),
                          [](double x, double y) { return std::abs(x - y) <= time_tol(x); }),
              out.end());
    return out;
}

double HistoryFunction::sup_norm(double a, double b) const {
    auto pts = breakpoints(a, b);
    double best = 0.0;
    for (size_t i = 0; i < pts.size(); ++i) {
        best = std::max(best, norm2(evaluate(pts[i])));
        best = std::max(best, norm2(evaluate_right(pts[i])));
        if (i + 1 < pts.size())
            best = std::max(best, norm2(evaluate(0.5 * (pts[i] + pts[i + 1]))));
    }
    return best;
}

}  // namespace rds
