#include "nehari/fibering.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <thread>

#include "nehari/rng.hpp"

namespace nehari {

namespace {

void require_t(double t, bool positive) {
    if (t < 0.0 || (positive && t == 0.0))
        throw std::domain_error("fibering: t " + std::string(positive ? "> 0" : ">= 0") +
                                " violated (t=" + std::to_string(t) + ")");
}

void require_nonzero(const ReducedIntegrals& ri) {
    if (!(ri.A > 0.0)) throw std::invalid_argument("fibering: zero field (A = 0)");
}

double phi_second_scale(const ReducedIntegrals& ri, const Exponents& ex, double t) {
    return (ex.p - 1.0) * std::pow(t, ex.p - 2.0) * ri.A +
           std::fabs(ex.q * ex.lambda * std::pow(t, ex.q - 1.0) * ri.B) +
           std::fabs(ex.r * std::pow(t, ex.r - 1.0) * ri.D);
}

RootKind kind_at(const ReducedIntegrals& ri, const Exponents& ex, double t, double& ps) {
    ps = phi_second(ri, ex, t);
    const double tol = 1e-9 * phi_second_scale(ri, ex, t);
    if (ps > tol) return RootKind::Min;
    if (ps < -tol) return RootKind::Max;
    return RootKind::Inflection;
}

FiberingRoot make_root(const ReducedIntegrals& ri, const Exponents& ex, double t) {
    FiberingRoot root;
    root.t = t;
    root.kind = kind_at(ri, ex, t, root.phi_second_value);
    root.phi_value = phi(ri, ex, t);
    return root;
}

// Bisection on G(t) = m_u(t) - lambda*B down to adjacent floats; returns
// the bracket endpoint or midpoint with the smallest |phi'|.
double bisect_root(const ReducedIntegrals& ri, const Exponents& ex, double lo, double hi,
                   double glo) {
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        if (!(mid > lo && mid < hi)) break;
        const double gm = m_u(ri, ex, mid) - ex.lambda * ri.B;
        if (gm == 0.0) return mid;
        if ((gm > 0.0) == (glo > 0.0)) {
            lo = mid;
            glo = gm;
        } else {
            hi = mid;
        }
    }
    const double cand[3] = {lo, 0.5 * (lo + hi), hi};
    double best = cand[0];
    double best_res = std::fabs(phi_prime(ri, ex, cand[0]));
    for (int k = 1; k < 3; ++k) {
        const double res = std::fabs(phi_prime(ri, ex, cand[k]));
        if (res < best_res) {
            best = cand[k];
            best_res = res;
        }
    }
    return best;
}

} // namespace

double phi(const ReducedIntegrals& ri, const Exponents& ex, double t) {
    require_t(t, false);
    return std::pow(t, ex.p) * ri.A / ex.p -
           ex.lambda * std::pow(t, ex.q + 1.0) * ri.B / (ex.q + 1.0) -
           std::pow(t, ex.r + 1.0) * ri.D / (ex.r + 1.0);
}

double phi_prime(const ReducedIntegrals& ri, const Exponents& ex, double t) {
    require_t(t, false);
    return std::pow(t, ex.p - 1.0) * ri.A - ex.lambda * std::pow(t, ex.q) * ri.B -
           std::pow(t, ex.r) * ri.D;
}

double phi_second(const ReducedIntegrals& ri, const Exponents& ex, double t) {
    require_t(t, false);
    return (ex.p - 1.0) * std::pow(t, ex.p - 2.0) * ri.A -
           ex.q * ex.lambda * std::pow(t, ex.q - 1.0) * ri.B -
           ex.r * std::pow(t, ex.r - 1.0) * ri.D;
}

double phi_prime_scale(const ReducedIntegrals& ri, const Exponents& ex, double t) {
    return std::max({1.0, std::pow(t, ex.p - 1.0) * ri.A,
                     std::fabs(ex.lambda * std::pow(t, ex.q) * ri.B),
                     std::fabs(std::pow(t, ex.r) * ri.D)});
}

double m_u(const ReducedIntegrals& ri, const Exponents& ex, double t) {
    require_t(t, true);
    return std::pow(t, ex.p - 1.0 - ex.q) * ri.A - std::pow(t, ex.r - ex.q) * ri.D;
}

double m_u_argmax(const ReducedIntegrals& ri, const Exponents& ex) {
    if (!(ri.D > 0.0)) throw std::invalid_argument("m_u_argmax: D > 0 required");
    return std::pow((ex.p - 1.0 - ex.q) * ri.A / ((ex.r - ex.q) * ri.D),
                    1.0 / (ex.r - ex.p + 1.0));
}

FiberingReport critical_points(const ReducedIntegrals& ri, const Exponents& ex) {
    require_nonzero(ri);
    FiberingReport rep;
    rep.sign_class = classify(ri);
    const double lb = ex.lambda * ri.B;

    if (ri.D > 0.0) {
        const TStar ts = t_star_and_delta(ri, ex);
        rep.t_star = ts.t;
        rep.F_at_t_star = ts.F_value;
    }

    if (ri.D <= 0.0 && ri.B <= 0.0) {
        // phi' > 0 for all t > 0: strictly increasing, no critical point.
        return rep;
    }

    if (ri.D > 0.0 && ri.B <= 0.0) {
        // Single global maximum beyond the m_u peak.
        const double that = m_u_argmax(ri, ex);
        double hi = 2.0 * that;
        for (int guard = 0; m_u(ri, ex, hi) - lb >= 0.0 && guard < 4000; ++guard) hi *= 2.0;
        rep.roots.push_back(make_root(ri, ex, bisect_root(ri, ex, that, hi,
                                                          m_u(ri, ex, that) - lb)));
        return rep;
    }

    if (ri.D <= 0.0 && ri.B > 0.0) {
        // m_u strictly increasing: single crossing, a fibering minimum.
        const double t0 = std::pow(lb / ri.A, 1.0 / (ex.p - 1.0 - ex.q));
        double lo = t0, hi = t0;
        for (int guard = 0; m_u(ri, ex, lo) - lb >= 0.0 && guard < 4000; ++guard) lo *= 0.5;
        for (int guard = 0; m_u(ri, ex, hi) - lb < 0.0 && guard < 4000; ++guard) hi *= 2.0;
        rep.roots.push_back(make_root(ri, ex, bisect_root(ri, ex, lo, hi,
                                                          m_u(ri, ex, lo) - lb)));
        rep.note = "single root is a fibering minimum (phi'' > 0): only the Plus branch exists";
        return rep;
    }

    // B > 0, D > 0: the two-root regime, threshold at lambda*B = max m_u.
    const double that = m_u_argmax(ri, ex);
    const double m_max = m_u(ri, ex, that);
    if (std::fabs(m_max - lb) <= 8.0 * 1e-16 * std::max(std::fabs(m_max), std::fabs(lb))) {
        rep.degenerate = true;
        rep.roots.push_back(make_root(ri, ex, that));
        rep.note = "threshold case lambda*B = max m_u: degenerate inflection root";
        return rep;
    }
    if (m_max < lb) {
        rep.degenerate = true;
        rep.note = "lambda*B exceeds max m_u: no critical points on this ray";
        return rep;
    }
    // Left root: at t0 = (lambda*B/A)^{1/(p-1-q)} the A-term alone equals
    // lambda*B, so G(t0) = -t0^{r-q} D < 0, giving a closed-form bracket.
    double lo = std::min(std::pow(lb / ri.A, 1.0 / (ex.p - 1.0 - ex.q)), that);
    for (int guard = 0; m_u(ri, ex, lo) - lb > 0.0 && guard < 4000; ++guard) lo *= 0.5;
    rep.roots.push_back(make_root(ri, ex, bisect_root(ri, ex, lo, that, m_u(ri, ex, lo) - lb)));
    double hi = 2.0 * that;
    for (int guard = 0; m_u(ri, ex, hi) - lb >= 0.0 && guard < 4000; ++guard) hi *= 2.0;
    rep.roots.push_back(make_root(ri, ex, bisect_root(ri, ex, that, hi,
                                                      m_u(ri, ex, that) - lb)));
    return rep;
}

TStar t_star_and_delta(const ReducedIntegrals& ri, const Exponents& ex) {
    require_nonzero(ri);
    if (!(ri.D > 0.0))
        throw ProjectionError("t* undefined for class " + classify(ri).name() +
                              ": requires D > 0");
    TStar ts;
    const double inv = 1.0 / (ex.r - ex.p + 1.0);
    ts.t = std::exp((std::log(ri.A) - std::log(ri.D)) * inv);
    ts.F_value = (1.0 / ex.p - 1.0 / (ex.r + 1.0)) *
                 std::exp(((ex.r + 1.0) * std::log(ri.A) - ex.p * std::log(ri.D)) * inv);
    return ts;
}

double project(const ReducedIntegrals& ri, const Exponents& ex, Branch branch) {
    const FiberingReport rep = critical_points(ri, ex);
    const RootKind want = branch == Branch::Plus ? RootKind::Min : RootKind::Max;
    for (const FiberingRoot& root : rep.roots)
        if (root.kind == want) return root.t;
    throw ProjectionError("no " + to_string(branch) + " branch for class " +
                          rep.sign_class.name() +
                          (rep.degenerate ? " (degenerate threshold)" : ""));
}

std::string to_string(Branch b) { return b == Branch::Plus ? "Plus" : "Minus"; }

std::string to_string(RootKind kind) {
    switch (kind) {
        case RootKind::Min: return "Min";
        case RootKind::Max: return "Max";
        case RootKind::Inflection: return "Inflection";
    }
    return "?";
}

namespace {

// One ascent trajectory maximizing lp_norm(u, m) / seminorm^{1/p},
// normalized to seminorm = 1 each step so the ratio is the lp norm.
double ascend_ratio(const ProblemSpec& spec, const EnergyWeights& w, double m, Field u,
                    int steps) {
    const double p = spec.p();
    const auto normalize = [&](Field& f) {
        const double a = seminorm_p(f, w, p);
        if (!(a > 0.0)) return false;
        const double scale = std::pow(a, -1.0 / p);
        for (double& v : f.values) v *= scale;
        return true;
    };
    if (!normalize(u)) return 0.0;
    double ratio = lp_norm(u, m);
    double step = 0.5;
    for (int it = 0; it < steps; ++it) {
        const double lpm = std::pow(ratio, m);
        Field op = apply_operator(u, w, p);
        Field dir(*u.mesh);
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double v = u.values[i];
            const double glp =
                v == 0.0 ? 0.0
                         : u.mesh->cell_measure(i) * std::pow(std::fabs(v), m - 2.0) * v / lpm;
            dir.values[i] = glp - u.mesh->cell_measure(i) * op.values[i];
        }
        bool improved = false;
        for (int bt = 0; bt < 30; ++bt) {
            Field trial = u;
            for (std::size_t i = 0; i < trial.size(); ++i)
                trial.values[i] += step * dir.values[i];
            if (!normalize(trial)) {
                step *= 0.5;
                continue;
            }
            const double trial_ratio = lp_norm(trial, m);
            if (trial_ratio > ratio) {
                u = std::move(trial);
                ratio = trial_ratio;
                step *= 1.5;
                improved = true;
                break;
            }
            step *= 0.5;
        }
        if (!improved) break;
    }
    return ratio;
}

Field random_start(const ProblemSpec& spec, std::uint64_t seed, bool eigenlike) {
    Field u(spec.mesh);
    if (eigenlike) {
        const double pi = 3.141592653589793;
        for (std::size_t i = 0; i < u.size(); ++i) {
            const double sx = std::sin(pi * (spec.mesh.node_x(i) - spec.mesh.lo[0]) /
                                       (spec.mesh.hi[0] - spec.mesh.lo[0]));
            double v = sx;
            if (spec.mesh.dim == 2)
                v *= std::sin(pi * (spec.mesh.node_y(i) - spec.mesh.lo[1]) /
                              (spec.mesh.hi[1] - spec.mesh.lo[1]));
            u.values[i] = v;
        }
        return u;
    }
    Rng rng(seed);
    for (double& v : u.values) v = rng.normal();
    return u;
}

double max_embedding_ratio(const ProblemSpec& spec, const EnergyWeights& w, double m,
                           const SamplerConfig& sampler) {
    const int trials = std::max(1, sampler.starts);
    std::vector<double> results(trials, 0.0);
    const Rng seeder(sampler.seed);

    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
    const int chunks = static_cast<int>(std::min<unsigned>(hw, trials));
    std::vector<std::future<void>> futures;
    for (int c = 0; c < chunks; ++c) {
        futures.push_back(std::async(std::launch::async, [&, c]() {
            for (int k = c; k < trials; k += chunks) {
                Field u = random_start(spec, seeder.derive(static_cast<std::uint64_t>(k) * 7919 +
                                                           static_cast<std::uint64_t>(m * 1000)),
                                       k == 0);
                results[k] = ascend_ratio(spec, w, m, std::move(u), sampler.ascent_steps);
            }
        }));
    }
    for (auto& f : futures) f.get();

    double best = 0.0;
    for (double r : results) best = std::max(best, r);  // deterministic reduction
    return best;
}

} // namespace

double Lambda0Estimate::delta1(double lambda) const {
    return std::pow(delta, (q + 1.0) / p) *
           (std::pow(delta, (p - 1.0 - q) / p) - lambda * c_const);
}

Lambda0Estimate estimate_lambda0(const ProblemSpec& spec, const EnergyWeights& w,
                                 const SamplerConfig& sampler) {
    if (sampler.starts <= 0 || sampler.ascent_steps < 0)
        throw std::invalid_argument("estimate_lambda0: sampler budget > 0 violated");
    Lambda0Estimate est;
    est.p = spec.p();
    est.q = spec.q;
    est.r = spec.r;
    est.h_sup = spec.h_sup();
    est.b_plus_sup = spec.b_plus_sup();

    if (!(est.b_plus_sup > 0.0)) {
        est.failure_reason = "b has no positive part: the B+ class is empty";
        return est;
    }
    if (!(est.h_sup > 0.0)) {
        est.failure_reason = "h vanishes identically: the H+ class is empty";
        return est;
    }

    est.S_p = max_embedding_ratio(spec, w, est.p, sampler);
    est.S_q1 = max_embedding_ratio(spec, w, est.q + 1.0, sampler);
    est.S_r1 = max_embedding_ratio(spec, w, est.r + 1.0, sampler);
    if (!(est.S_p > 1e-12) || !(est.S_q1 > 1e-12) || !(est.S_r1 > 1e-12)) {
        est.failure_reason = "sampler found a degenerate embedding constant (S ~ 0)";
        return est;
    }

    // M chains the W^{alpha,p} comparison c(theta) = max{1, theta^{-1/p}}
    // with the norm-equivalence constant (1 + S_p) for ||.||_X vs ||.||_{X0}.
    est.M = std::max(1.0, std::pow(spec.kernel.theta, -1.0 / est.p)) * (1.0 + est.S_p);

    const double p = est.p, q = est.q, r = est.r;
    const double log_msr = std::log(est.M * est.S_r1);
    est.delta = std::exp(std::log((r - p + 1.0) / (p * (r + 1.0))) +
                         (-p * std::log(est.b_plus_sup) - p * (r + 1.0) * log_msr) /
                             (r - p + 1.0));
    est.c_const = (1.0 / (q + 1.0)) * est.h_sup * std::pow(est.M * est.S_q1, q + 1.0) *
                  std::pow(p * (r + 1.0) / (r - p + 1.0), (q + 1.0) / p);
    est.lambda0 = std::pow(est.delta, (p - 1.0 - q) / p) / est.c_const;

    est.ok = std::isfinite(est.delta) && est.delta > 0.0 && std::isfinite(est.lambda0) &&
             est.lambda0 > 0.0;
    if (!est.ok) est.failure_reason = "estimate produced a non-finite threshold";
    return est;
}

} // namespace nehari
