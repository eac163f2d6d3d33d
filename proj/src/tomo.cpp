#include "mdiqrng/tomo.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

namespace mdiqrng::tomo {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp_direction(double v) { return std::clamp(v, -1.0, 1.0); }

}  // namespace

void SimModel::validate() const {
    if (!(mu > 0.0)) throw ConfigError("sim model mu must be positive");
    if (!(eta > 0.0 && eta <= 1.0)) throw ConfigError("sim model eta must be in (0,1]");
}

ParamBounds povm_parameter_bounds_clamped(const std::array<decoy::Interval, 4>& p1,
                                          double a1_floor) {
    const decoy::Interval pz0 = p1[0], pz1 = p1[1], px = p1[2], py = p1[3];
    ParamBounds b;
    b.a1.lower = 0.5 * (pz0.lower + pz1.lower);
    b.a1.upper = 0.5 * (pz0.upper + pz1.upper);
    b.a1.lower = std::max(b.a1.lower, a1_floor);
    b.a1.upper = std::clamp(b.a1.upper, b.a1.lower, 1.0 - 1e-9);

    // p(1|j) = a1 (1 + n . r_j): the X+/Y+ probes bound nx/ny through
    // p/a1 - 1, the Z pair bounds nz through their difference.
    b.nx.lower = clamp_direction(px.lower / b.a1.upper - 1.0);
    b.nx.upper = clamp_direction(px.upper / b.a1.lower - 1.0);
    b.ny.lower = clamp_direction(py.lower / b.a1.upper - 1.0);
    b.ny.upper = clamp_direction(py.upper / b.a1.lower - 1.0);
    b.nz.lower = clamp_direction((pz0.lower - pz1.upper) / (2.0 * b.a1.upper));
    b.nz.upper = clamp_direction((pz0.upper - pz1.lower) / (2.0 * b.a1.lower));
    b.nz.lower = std::min(b.nz.lower, b.nz.upper);
    b.nx.lower = std::min(b.nx.lower, b.nx.upper);
    b.ny.lower = std::min(b.ny.lower, b.ny.upper);
    return b;
}

ParamBounds povm_parameter_bounds(const std::array<decoy::Interval, 4>& p1) {
    if (0.5 * (p1[0].lower + p1[1].lower) <= 0.0) {
        throw NoRandomness("single-photon lower bounds admit a1 = 0");
    }
    return povm_parameter_bounds_clamped(p1, 0.0);
}

qmath::Povm simulated_povm(const SimModel& m, double p_d) {
    m.validate();
    // Per-bin no-click amplitude; with dark counts folded in, each bin's
    // click probability becomes 1 - (1-p_d) e^{-mu eta / 2}.
    const double q = (1.0 - p_d) * std::exp(-m.mu * m.eta / 2.0);
    const double p0 = q * q;
    const double p1 = 2.0 * q * (1.0 - q);
    const double p2 = (1.0 - q) * (1.0 - q);
    qmath::Povm povm;
    povm.lambda1 = qmath::QubitOperator::projector1() * p1;
    povm.lambda0 = qmath::QubitOperator::projector0() * p1 +
                   qmath::QubitOperator::identity() * (p0 + p2);
    return povm;
}

bool feasible(const qmath::PovmParams& p, const ParamBounds& b) {
    if (!(p.a1 >= b.a1.lower && p.a1 <= b.a1.upper)) return false;
    if (!(p.n.x >= b.nx.lower && p.n.x <= b.nx.upper)) return false;
    if (!(p.n.y >= b.ny.lower && p.n.y <= b.ny.upper)) return false;
    if (!(p.n.z >= b.nz.lower && p.n.z <= b.nz.upper)) return false;
    const double nn = p.n.norm();
    if (nn > 1.0 + 1e-9) return false;
    // lambda1 eigenvalues a1(1 +- |n|) >= 0 given a1 > 0; lambda0 needs
    // a1 (1 + |n|) <= 1.
    if (p.a1 <= 0.0 || p.a1 * (1.0 + nn) > 1.0 + 1e-9) return false;
    return true;
}

namespace {

using Point4 = std::array<double, 4>;

struct BoxAxes {
    std::array<decoy::Interval, 4> iv;

    double clampi(int i, double v) const { return std::clamp(v, iv[i].lower, iv[i].upper); }
};

qmath::PovmParams to_params(const Point4& x) {
    return {x[0], {x[1], x[2], x[3]}};
}

double objective(const Point4& x, const ParamBounds& b,
                 const qmath::PovmFidelityEvaluator& fid) {
    const qmath::PovmParams p = to_params(x);
    if (!feasible(p, b)) return kInf;
    try {
        return fid(qmath::params_to_povm(p));
    } catch (const Error&) {
        return kInf;  // zero-trace corner (a1 -> 1)
    }
}

// Standard Nelder-Mead on the box-clipped objective; deterministic for a
// fixed start.
double nelder_mead(Point4 start, const ParamBounds& b, const BoxAxes& axes,
                   const qmath::PovmFidelityEvaluator& fid, int max_iter,
                   std::array<double, 4> step) {
    constexpr double kAlpha = 1.0, kGamma = 2.0, kRho = 0.5, kSigma = 0.5;
    struct Vertex {
        Point4 x;
        double f;
    };
    std::array<Vertex, 5> s;
    const auto clip = [&](Point4 x) {
        for (int i = 0; i < 4; ++i) x[i] = axes.clampi(i, x[i]);
        return x;
    };
    const auto eval = [&](const Point4& x) { return objective(x, b, fid); };

    s[0] = {start, eval(start)};
    for (int i = 0; i < 4; ++i) {
        Point4 x = start;
        x[i] = axes.clampi(i, x[i] + step[i]);
        if (x[i] == start[i]) x[i] = axes.clampi(i, start[i] - step[i]);
        s[i + 1] = {x, eval(x)};
    }

    for (int it = 0; it < max_iter; ++it) {
        std::sort(s.begin(), s.end(), [](const Vertex& a, const Vertex& v) { return a.f < v.f; });
        double spread = 0.0;
        for (int i = 0; i < 4; ++i) {
            spread = std::max(spread, std::abs(s[4].x[i] - s[0].x[i]));
        }
        if (spread < 1e-12) break;

        Point4 c{};  // centroid of the best four
        for (int v = 0; v < 4; ++v) {
            for (int i = 0; i < 4; ++i) c[i] += s[v].x[i] / 4.0;
        }
        const auto blend = [&](double t) {
            Point4 x;
            for (int i = 0; i < 4; ++i) x[i] = c[i] + t * (s[4].x[i] - c[i]);
            return clip(x);
        };

        Point4 xr = blend(-kAlpha);
        const double fr = eval(xr);
        if (fr < s[0].f) {
            Point4 xe = blend(-kGamma);
            const double fe = eval(xe);
            s[4] = fe < fr ? Vertex{xe, fe} : Vertex{xr, fr};
            continue;
        }
        if (fr < s[3].f) {
            s[4] = {xr, fr};
            continue;
        }
        Point4 xc = blend(kRho);
        const double fc = eval(xc);
        if (fc < s[4].f) {
            s[4] = {xc, fc};
            continue;
        }
        for (int v = 1; v < 5; ++v) {  // shrink toward the best vertex
            for (int i = 0; i < 4; ++i) {
                s[v].x[i] = s[0].x[i] + kSigma * (s[v].x[i] - s[0].x[i]);
            }
            s[v].f = eval(s[v].x);
        }
    }
    double best = kInf;
    for (const Vertex& v : s) best = std::min(best, v.f);
    return best;
}

}  // namespace

double min_fidelity(const ParamBounds& b, const qmath::Povm& reference,
                    const OptimizerSettings& opt) {
    const qmath::PovmFidelityEvaluator fid(reference);
    BoxAxes axes{{b.a1, b.nx, b.ny, b.nz}};

    const int k = std::max(2, opt.grid_points);
    std::array<std::vector<double>, 4> grid;
    for (int i = 0; i < 4; ++i) {
        const decoy::Interval& iv = axes.iv[i];
        if (iv.width() <= 0.0) {
            grid[i] = {iv.lower};
        } else {
            grid[i].resize(k);
            for (int g = 0; g < k; ++g) {
                grid[i][g] = iv.lower + iv.width() * g / (k - 1);
            }
        }
    }
    const std::size_t n0 = grid[0].size(), n1 = grid[1].size(), n2 = grid[2].size(),
                      n3 = grid[3].size();
    const std::size_t total = n0 * n1 * n2 * n3;
    std::vector<double> values(total);

#pragma omp parallel for schedule(static) if (opt.parallel)
    for (std::int64_t flat = 0; flat < static_cast<std::int64_t>(total); ++flat) {
        std::size_t r = static_cast<std::size_t>(flat);
        const std::size_t i3 = r % n3;
        r /= n3;
        const std::size_t i2 = r % n2;
        r /= n2;
        const std::size_t i1 = r % n1;
        const std::size_t i0 = r / n1;
        values[flat] = objective({grid[0][i0], grid[1][i1], grid[2][i2], grid[3][i3]}, b, fid);
    }

    // Deterministic selection of the best feasible starts: sort by
    // (value, flat index).
    std::vector<std::size_t> order;
    order.reserve(total);
    for (std::size_t i = 0; i < total; ++i) {
        if (std::isfinite(values[i])) order.push_back(i);
    }
    if (order.empty()) {
        // The lattice can straddle a thin feasible sliver; try the center.
        const Point4 center = {0.5 * (b.a1.lower + b.a1.upper), 0.5 * (b.nx.lower + b.nx.upper),
                               0.5 * (b.ny.lower + b.ny.upper), 0.5 * (b.nz.lower + b.nz.upper)};
        const double fc = objective(center, b, fid);
        if (!std::isfinite(fc)) throw InfeasibleRegion("no feasible point in the parameter box");
        return std::clamp(fc - opt.margin, 0.0, 1.0);
    }
    const std::size_t starts = std::min<std::size_t>(order.size(),
                                                     static_cast<std::size_t>(std::max(1, opt.refine_count)));
    std::partial_sort(order.begin(), order.begin() + starts, order.end(),
                      [&](std::size_t a, std::size_t c) {
                          return values[a] != values[c] ? values[a] < values[c] : a < c;
                      });

    std::array<double, 4> step{};
    for (int i = 0; i < 4; ++i) {
        step[i] = std::max(axes.iv[i].width() / (k - 1), 1e-6);
    }

    double best = values[order[0]];
    for (std::size_t si = 0; si < starts; ++si) {
        std::size_t r = order[si];
        const std::size_t i3 = r % n3;
        r /= n3;
        const std::size_t i2 = r % n2;
        r /= n2;
        const std::size_t i1 = r % n1;
        const std::size_t i0 = r / n1;
        const Point4 start = {grid[0][i0], grid[1][i1], grid[2][i2], grid[3][i3]};
        best = std::min(best, nelder_mead(start, b, axes, fid, opt.refine_max_iter, step));
    }
    return std::clamp(best - opt.margin, 0.0, 1.0);
}

}  // namespace mdiqrng::tomo
