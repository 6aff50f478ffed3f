#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "heunlim/algebra.hpp"
#include "heunlim/heun.hpp"
#include "heunlim/limiting.hpp"
#include "heunlim/linalg.hpp"
#include "heunlim/operators.hpp"
#include "heunlim/orthopoly.hpp"
#include "report.hpp"

using heunlim::cli::Json;
namespace hl = heunlim;

namespace {

constexpr const char* kVersion = "0.1.0";

constexpr int exit_ok = 0;
constexpr int exit_bad_input = 2;
constexpr int exit_tolerance = 3;
constexpr int exit_no_convergence = 4;

// splitmix64, the same generator the test suite uses, kept local so the
// tool does not depend on test support code. Draws are identical across
// platforms, which the byte-determinism guarantee rests on.
class Draws {
public:
    explicit Draws(std::uint64_t seed) : state_(seed) {}

    double uniform(double lo, double hi) {
        state_ += 0x9e3779b97f4a7c15ull;
        std::uint64_t z = state_;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z ^= z >> 31;
        return lo + (hi - lo) * std::ldexp(static_cast<double>(z >> 11), -53);
    }

private:
    std::uint64_t state_;
};

struct OutputOpts {
    std::string path;            // empty = stdout
    std::string format = "json";
    double tol_scale = 1.0;
    bool timings = false;
};

class Stopwatch {
public:
    void lap(Json& timings, const std::string& name, bool enabled) {
        const auto now = std::chrono::steady_clock::now();
        if (enabled)
            timings.set(name, Json::number(std::chrono::duration<double>(now - last_).count()));
        last_ = now;
    }

private:
    std::chrono::steady_clock::time_point last_ = std::chrono::steady_clock::now();
};

// Named residual-vs-tolerance rows. A NaN residual never passes.
struct CheckSet {
    Json rows = Json::array();
    Json residuals = Json::object();
    bool all_pass = true;

    void add(const std::string& name, double residual, double tolerance) {
        const bool pass = residual <= tolerance;
        rows.push(Json::object()
                      .set("name", Json::text(name))
                      .set("residual", Json::number(residual))
                      .set("tolerance", Json::number(tolerance))
                      .set("pass", Json::boolean(pass)));
        residuals.set(name, Json::number(residual));
        all_pass = all_pass && pass;
    }
};

int emit(const Json& doc, const OutputOpts& out) {
    const std::string body =
        out.format == "csv" ? doc.render_csv() : doc.render_json();
    if (out.path.empty()) {
        std::fwrite(body.data(), 1, body.size(), stdout);
        return exit_ok;
    }
    std::ofstream file(out.path, std::ios::binary);
    if (!file) {
        std::fprintf(stderr, "heunlim: cannot open output file '%s'\n", out.path.c_str());
        return exit_bad_input;
    }
    file << body;
    return file ? exit_ok : exit_bad_input;
}

Json assemble(Json config, Json results, Json residuals, Json timings) {
    Json doc = Json::object();
    doc.set("config", std::move(config));
    doc.set("results", std::move(results));
    doc.set("residuals", std::move(residuals));
    doc.set("timings", std::move(timings));
    doc.set("version", Json::text(kVersion));
    return doc;
}

int emit_error(const Json& config, const OutputOpts& out, int code,
               const char* kind, const std::string& message) {
    Json doc = Json::object();
    doc.set("config", config);
    doc.set("error", Json::object()
                         .set("kind", Json::text(kind))
                         .set("message", Json::text(message))
                         .set("exit_code", Json::integer(code)));
    doc.set("version", Json::text(kVersion));
    emit(doc, out);
    return code;
}

// Maps the library's exception taxonomy onto the exit-code contract:
// logic errors are bad input, the convergence cap is its own code, and the
// remaining runtime errors are tolerance gates tripping inside the library.
int guarded(const Json& config, const OutputOpts& out,
            const std::function<int()>& body) {
    try {
        return body();
    } catch (const hl::ConvergenceError& e) {
        return emit_error(config, out, exit_no_convergence, "non_convergence", e.what());
    } catch (const std::logic_error& e) {
        return emit_error(config, out, exit_bad_input, "bad_input", e.what());
    } catch (const std::runtime_error& e) {
        return emit_error(config, out, exit_tolerance, "tolerance_failure", e.what());
    }
}

Json tau_json(const hl::HeunTau& t) {
    return Json::series(std::vector<double>{t.t0, t.t1, t.t2, t.t3, t.t4});
}

hl::HeunTau tau_from(const std::vector<double>& v) {
    return hl::HeunTau{v[0], v[1], v[2], v[3], v[4]};
}

Json closure_json(const hl::ClosureReport& r) {
    return Json::object()
        .set("coefficients", Json::series(r.coefficients))
        .set("residual", Json::number(r.residual))
        .set("window", Json::integer(r.window))
        .set("rank_deficient", Json::boolean(r.rank_deficient));
}

// Entrywise gap relative to the reference scale, restricted to the columns
// both operators represent exactly.
double rel_gap(const hl::BasisOperator& a, const hl::BasisOperator& b) {
    const auto cols = static_cast<std::size_t>(std::min(a.basis.window, b.basis.window)) + 1;
    double gap = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < a.matrix.rows(); ++i)
        for (std::size_t j = 0; j < cols; ++j) {
            gap = std::max(gap, std::abs(a.matrix(i, j) - b.matrix(i, j)));
            scale = std::max(scale, std::abs(b.matrix(i, j)));
        }
    return gap / scale;
}

// Largest relative coefficient beyond degree n+1 in the image of degree n,
// over the operator's exactness window.
double raising_excess(const hl::BasisOperator& op) {
    double worst = 0.0;
    for (int j = 0; j <= op.basis.window; ++j) {
        double scale = 0.0, excess = 0.0;
        for (std::size_t i = 0; i < op.matrix.rows(); ++i) {
            const double v = std::abs(op.matrix(i, static_cast<std::size_t>(j)));
            scale = std::max(scale, v);
            if (i > static_cast<std::size_t>(j) + 1) excess = std::max(excess, v);
        }
        if (scale > 0.0) worst = std::max(worst, excess / scale);
    }
    return worst;
}

// ---------------------------------------------------------------------------
// limiting commands

struct LimitOpts {
    int n = 16;
    double alpha = 0.0;
    double beta = 0.0;
    int j1 = -1;  // -1 = default to n (no restriction)
    int j2 = -1;
};

Json limit_config(const char* cmd, const LimitOpts& o, const OutputOpts& out) {
    return Json::object()
        .set("command", Json::text(cmd))
        .set("n", Json::integer(o.n))
        .set("alpha", Json::number(o.alpha))
        .set("beta", Json::number(o.beta))
        .set("j1", Json::integer(o.j1))
        .set("j2", Json::integer(o.j2))
        .set("format", Json::text(out.format))
        .set("tol_scale", Json::number(out.tol_scale));
}

void resolve_windows(LimitOpts& o) {
    if (o.j1 < 0) o.j1 = o.n;
    if (o.j2 < 0) o.j2 = o.n;
}

int run_solve(LimitOpts o, const OutputOpts& out, bool spectra_only) {
    resolve_windows(o);
    const Json config = limit_config(spectra_only ? "spectrum" : "solve", o, out);
    return guarded(config, out, [&]() {
        Stopwatch watch;
        Json timings = Json::object();
        const hl::HahnParams hp{o.alpha, o.beta, o.n};
        const hl::LimitingConfig lc{hp, o.j1, o.j2};
        const hl::HahnBasis basis = hl::hahn_basis(hp);
        watch.lap(timings, "basis_s", out.timings);

        const bool interior = o.j1 < o.n && o.j2 < o.n;
        hl::CommutingSolution sol;
        if (interior) sol = hl::commuting_tau(lc, basis);
        const hl::SpectralReport rep = hl::solve(lc, basis);
        watch.lap(timings, "solve_s", out.timings);

        CheckSet checks;
        const double ts = out.tol_scale;
        if (interior) {
            const double m_norm = hl::frobenius_norm(sol.m_matrix);
            checks.add("commutator_pi1", sol.commutator_residuals.first, 1e-10 * m_norm * ts);
            checks.add("commutator_pi2", sol.commutator_residuals.second, 1e-10 * m_norm * ts);
        }
        double eig_gap = 0.0;
        for (std::size_t i = 0; i < rep.v1_eigs_direct.size(); ++i)
            eig_gap = std::max(eig_gap,
                               std::abs(rep.v1_eigs_direct[i] - rep.v1_eigs_via_m[i]));
        checks.add("eigenvalue_match", eig_gap, 1e-9 * ts);
        checks.add("eigenvector_angles", rep.eigenvector_agreement, 1e-7 * ts);

        Json results = Json::object();
        if (interior) {
            results.set("tau", tau_json(sol.tau));
            results.set("spectrum_gap", Json::number(sol.spectrum_gap));
            results.set("degenerate_spectrum", Json::boolean(sol.degenerate_spectrum));
        }
        if (spectra_only) {
            results.set("v1_spectrum_direct", Json::series(rep.v1_eigs_direct));
            results.set("v1_spectrum_via_m", Json::series(rep.v1_eigs_via_m));
            results.set("m_spectrum", Json::series(rep.m_eigs));
            results.set("clustering",
                        Json::object()
                            .set("v1_min_gap", Json::number(rep.v1_min_gap))
                            .set("m_min_gap", Json::number(rep.m_min_gap))
                            .set("gap_ratio",
                                 Json::number(rep.m_min_gap /
                                              std::max(rep.v1_min_gap, 1e-300))));
        } else {
            results.set("v1_eigs_direct", Json::series(rep.v1_eigs_direct));
            results.set("v1_eigs_via_m", Json::series(rep.v1_eigs_via_m));
            results.set("m_eigs", Json::series(rep.m_eigs));
            results.set("v1_min_gap", Json::number(rep.v1_min_gap));
            results.set("m_min_gap", Json::number(rep.m_min_gap));
        }
        results.set("eigenvector_agreement", Json::number(rep.eigenvector_agreement));
        results.set("boundary_case", Json::boolean(rep.boundary_case));
        results.set("used_cluster_fallback", Json::boolean(rep.used_cluster_fallback));
        results.set("checks", std::move(checks.rows));
        watch.lap(timings, "report_s", out.timings);

        const int rc = emit(assemble(config, std::move(results),
                                     std::move(checks.residuals), std::move(timings)),
                            out);
        if (rc != exit_ok) return rc;
        return checks.all_pass ? exit_ok : exit_tolerance;
    });
}

int run_kernel(LimitOpts o, const OutputOpts& out) {
    resolve_windows(o);
    const Json config = limit_config("kernel", o, out);
    return guarded(config, out, [&]() {
        Stopwatch watch;
        Json timings = Json::object();
        const hl::HahnParams hp{o.alpha, o.beta, o.n};
        const hl::HahnBasis basis = hl::hahn_basis(hp);
        const hl::KernelMatrix k = hl::kernel_matrix({hp, o.j1, o.j2}, basis);
        watch.lap(timings, "kernel_s", out.timings);

        CheckSet checks;
        checks.add("route_agreement", k.route_gap, 1e-10 * out.tol_scale);
        checks.add("projection_match", k.direct_gap, 1e-10 * out.tol_scale);

        Json results = Json::object()
                           .set("k", Json::table(k.k))
                           .set("route", Json::integer(k.route))
                           .set("route_gap", Json::number(k.route_gap))
                           .set("direct_gap", Json::number(k.direct_gap))
                           .set("checks", std::move(checks.rows));
        const int rc = emit(assemble(config, std::move(results),
                                     std::move(checks.residuals), std::move(timings)),
                            out);
        if (rc != exit_ok) return rc;
        return checks.all_pass ? exit_ok : exit_tolerance;
    });
}

// ---------------------------------------------------------------------------
// heun-action

struct ActionOpts {
    int degree_cap = 16;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> tau;
};

int run_heun_action(const ActionOpts& o, const OutputOpts& out) {
    Json config = Json::object()
                      .set("command", Json::text("heun-action"))
                      .set("degree_cap", Json::integer(o.degree_cap))
                      .set("alpha", Json::number(o.alpha))
                      .set("beta", Json::number(o.beta))
                      .set("tau", Json::series(o.tau))
                      .set("format", Json::text(out.format))
                      .set("tol_scale", Json::number(out.tol_scale));
    return guarded(config, out, [&]() {
        if (o.degree_cap < 4)
            throw std::invalid_argument("heun-action: degree cap must be at least 4");
        Stopwatch watch;
        Json timings = Json::object();
        const hl::JacobiParams p{o.alpha, o.beta};
        const hl::HeunTau t = tau_from(o.tau);
        const int cap = o.degree_cap;

        const hl::RecurrencePair rec = hl::jacobi_recurrence(p, static_cast<std::size_t>(cap));
        const hl::Matrix rows = hl::jacobi_basis_matrix(rec, cap);
        std::vector<double> lam(static_cast<std::size_t>(cap) + 1);
        for (int n = 0; n <= cap; ++n)
            lam[static_cast<std::size_t>(n)] = -n * (n + p.alpha + p.beta + 1.0);
        const hl::BasisOperator w_mono =
            hl::algebraic_heun(hl::monomial_x(cap), hl::monomial_hypergeom(p, cap), t);
        const hl::BasisOperator m = hl::to_jacobi_basis(w_mono, p, rows);
        watch.lap(timings, "build_s", out.timings);

        const hl::TridiagonalAction act = hl::tridiagonal_action(m, t, rec, lam);
        const double excess = raising_excess(w_mono);
        watch.lap(timings, "action_s", out.timings);

        CheckSet checks;
        const double ts = out.tol_scale;
        checks.add("band_xi", act.dev_xi, 1e-9 * ts);
        checks.add("band_eta", act.dev_eta, 1e-9 * ts);
        checks.add("band_zeta", act.dev_zeta_u, 1e-9 * ts);
        checks.add("degree_raising_excess", excess, 1e-12 * ts);

        Json results = Json::object()
                           .set("window", Json::integer(m.basis.window))
                           .set("xi", Json::series(act.xi))
                           .set("eta", Json::series(act.eta))
                           .set("zeta_u", Json::series(act.zeta_u))
                           .set("leakage", Json::number(act.leakage))
                           .set("eta_shift", Json::number(act.eta_shift))
                           .set("raising",
                                Json::object()
                                    .set("window", Json::integer(w_mono.basis.window))
                                    .set("max_excess", Json::number(excess)))
                           .set("checks", std::move(checks.rows));
        const int rc = emit(assemble(std::move(config), std::move(results),
                                     std::move(checks.residuals), std::move(timings)),
                            out);
        if (rc != exit_ok) return rc;
        return checks.all_pass ? exit_ok : exit_tolerance;
    });
}

// ---------------------------------------------------------------------------
// algebra-check

struct AlgebraOpts {
    int n = 8;
    double alpha = 0.0;
    double beta = 0.0;
    std::vector<double> tau;  // empty = quadratic relations only
};

int run_algebra_check(const AlgebraOpts& o, const OutputOpts& out) {
    Json config = Json::object()
                      .set("command", Json::text("algebra-check"))
                      .set("n", Json::integer(o.n))
                      .set("alpha", Json::number(o.alpha))
                      .set("beta", Json::number(o.beta))
                      .set("format", Json::text(out.format))
                      .set("tol_scale", Json::number(out.tol_scale));
    if (!o.tau.empty()) config.set("tau", Json::series(o.tau));
    return guarded(config, out, [&]() {
        Stopwatch watch;
        Json timings = Json::object();
        const hl::HahnParams p{o.alpha, o.beta, o.n};
        const auto [rel1, rel2] = hl::hahn_algebra_check(p);
        watch.lap(timings, "quadratic_s", out.timings);

        CheckSet checks;
        const double tol = 1e-9 * out.tol_scale;
        checks.add("quadratic_relation_1", rel1.residual, tol);
        checks.add("quadratic_relation_2", rel2.residual, tol);

        Json results = Json::object()
                           .set("quadratic_relation_1", closure_json(rel1))
                           .set("quadratic_relation_2", closure_json(rel2));
        if (!o.tau.empty()) {
            const auto [c1, c2] = hl::cubic_closure_hahn(tau_from(o.tau), p);
            watch.lap(timings, "cubic_s", out.timings);
            checks.add("cubic_relation_1", c1.residual, tol);
            checks.add("cubic_relation_2", c2.residual, tol);
            results.set("cubic_relation_1", closure_json(c1));
            results.set("cubic_relation_2", closure_json(c2));
            results.set("e1", Json::number(c2.coefficients[0]));
            results.set("e2", Json::number(c2.coefficients[1]));
        }
        results.set("checks", std::move(checks.rows));
        const int rc = emit(assemble(std::move(config), std::move(results),
                                     std::move(checks.residuals), std::move(timings)),
                            out);
        if (rc != exit_ok) return rc;
        return checks.all_pass ? exit_ok : exit_tolerance;
    });
}

// ---------------------------------------------------------------------------
// verify suites

void suite_orthopoly(Draws& rng, double ts, CheckSet& checks) {
    for (int d = 0; d < 3; ++d) {
        const hl::JacobiParams p{rng.uniform(-0.9, 3.0), rng.uniform(-0.9, 3.0)};
        const hl::RecurrencePair rec = hl::jacobi_recurrence(p, 12);
        const hl::GaussQuadrature gq = hl::golub_welsch(rec, 13);

        double wsum = 0.0;
        for (const double w : gq.weights) wsum += w;
        checks.add("orthopoly/quadrature-mass-" + std::to_string(d),
                   std::abs(wsum - rec.mass) / rec.mass, 1e-12 * ts);

        const hl::NormConstants norms = hl::jacobi_norms(rec, 8);
        double gram = 0.0;
        for (int i = 0; i <= 8; ++i)
            for (int j = 0; j <= i; ++j) {
                double s = 0.0;
                for (std::size_t k = 0; k < gq.nodes.size(); ++k)
                    s += gq.weights[k] * hl::jacobi_eval(rec, i, gq.nodes[k]) *
                         hl::jacobi_eval(rec, j, gq.nodes[k]);
                const double want = i == j ? norms.h[i] : 0.0;
                gram = std::max(gram, std::abs(s - want) /
                                          std::sqrt(norms.h[i] * norms.h[j]));
            }
        checks.add("orthopoly/quadrature-gram-" + std::to_string(d), gram, 1e-10 * ts);
    }

    {
        const double a = rng.uniform(-0.9, 3.0);
        const hl::RecurrencePair rec = hl::jacobi_recurrence({a, a}, 12);
        double dev = 0.0;
        for (const double b : rec.b) dev = std::max(dev, std::abs(b - 0.5));
        checks.add("orthopoly/symmetric-midpoint", dev, 1e-15 * ts);
    }

    for (int d = 0; d < 3; ++d) {
        const hl::HahnParams p{rng.uniform(-0.9, 3.0), rng.uniform(-0.9, 3.0), 12};
        const hl::HahnBasis basis = hl::hahn_basis(p);

        double wsum = 0.0, dsum = 0.0;
        for (const double w : basis.w) wsum += w;
        for (const double w : basis.w_dual) dsum += w;
        checks.add("orthopoly/hahn-weight-sums-" + std::to_string(d),
                   std::max(std::abs(wsum - 1.0), std::abs(dsum - 1.0)), 1e-12 * ts);

        double mu_dev = 0.0;
        for (std::size_t n = 0; n < basis.mu.size(); ++n) {
            const double want = static_cast<double>(n) * (n + p.alpha + p.beta + 1.0);
            mu_dev = std::max(mu_dev, std::abs(basis.mu[n] - want) / std::max(1.0, want));
        }
        checks.add("orthopoly/hahn-spectrum-" + std::to_string(d), mu_dev, 1e-9 * ts);

        checks.add("orthopoly/leonard-duality-" + std::to_string(d),
                   hl::leonard_check(hl::duality_data(p, basis)), 1e-10 * ts);

        const hl::RecurrencePair hrec = hl::hahn_recurrence(basis);
        double min_u = 1.0;
        for (std::size_t n = 1; n < hrec.u.size(); ++n) min_u = std::min(min_u, hrec.u[n]);
        checks.add("orthopoly/hahn-recurrence-positive-" + std::to_string(d),
                   std::max(0.0, -min_u), 0.0);
    }
}

void suite_heun(Draws& rng, double ts, CheckSet& checks) {
    for (int d = 0; d < 3; ++d) {
        const hl::JacobiParams p{rng.uniform(-0.9, 3.0), rng.uniform(-0.9, 3.0)};
        const hl::HeunTau t{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                            rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const int cap = 10;

        const hl::BasisOperator prod =
            hl::algebraic_heun(hl::monomial_x(cap), hl::monomial_hypergeom(p, cap), t);
        const hl::BasisOperator expanded = hl::heun_jacobi_expanded(t, p, cap);
        checks.add("heun/product-vs-expanded-" + std::to_string(d),
                   rel_gap(prod, expanded), 1e-12 * ts);

        checks.add("heun/parameter-fit-" + std::to_string(d),
                   hl::match_heun_params(t, p).fit_residual, 1e-10 * ts);

        checks.add("heun/degree-raising-" + std::to_string(d), raising_excess(prod),
                   1e-12 * ts);

        const hl::HahnParams hp{p.alpha, p.beta, 8};
        const hl::BasisOperator grid =
            hl::algebraic_heun(hl::grid_x(8), hl::hahn_operator(hp), t);
        checks.add("heun/grid-realizations-" + std::to_string(d),
                   rel_gap(hl::heun_hahn(t, hp), grid), 1e-11 * ts);
    }

    for (int d = 0; d < 2; ++d) {
        // exponents clear of integers keep the reversed-family recurrence
        // denominators away from their poles
        const hl::JacobiParams p{rng.uniform(0.05, 0.95), rng.uniform(0.05, 0.95)};
        const hl::TruncationData td = hl::truncation_setup(p, 5);
        const hl::ExpansionData ex = hl::wilson_expansion(td, p);
        checks.add("heun/wilson-routes-" + std::to_string(d), ex.route_error, 1e-9 * ts);
        checks.add("heun/wilson-bands-" + std::to_string(d),
                   std::max({ex.printed_dev_b, ex.printed_dev_u, ex.printed_dev_f}),
                   1e-8 * ts);

        double leakage = 0.0;
        const hl::BasisOperator block = hl::truncated_heun(td, p, &leakage);
        checks.add("heun/truncation-leakage-" + std::to_string(d),
                   leakage / hl::frobenius_norm(block.matrix), 1e-11 * ts);
    }
}

void suite_algebra(Draws& rng, double ts, CheckSet& checks) {
    for (int d = 0; d < 2; ++d) {
        const hl::HahnParams p{rng.uniform(-0.9, 3.0), rng.uniform(-0.9, 3.0), 6};
        const auto [rel1, rel2] = hl::hahn_algebra_check(p);
        checks.add("algebra/hahn-closure-" + std::to_string(d),
                   std::max(rel1.residual, rel2.residual), 1e-9 * ts);
    }

    for (int d = 0; d < 2; ++d) {
        const hl::HahnParams p{rng.uniform(-0.9, 3.0), rng.uniform(-0.9, 3.0), 8};
        const hl::HeunTau t{rng.uniform(-1, 1), rng.uniform(-1, 1), rng.uniform(-1, 1),
                            rng.uniform(-1, 1), rng.uniform(-1, 1)};
        const auto [c1, c2] = hl::cubic_closure_hahn(t, p);
        checks.add("algebra/cubic-closure-" + std::to_string(d),
                   std::max(c1.residual, c2.residual), 1e-9 * ts);
    }

    {
        // tau1 + tau2 = 0 with tau2 = +-tau4 collapses the cubic extension
        const hl::HahnParams p{rng.uniform(-0.9, 3.0), rng.uniform(-0.9, 3.0), 8};
        const double c = rng.uniform(0.2, 1.0);
        for (const double sign : {1.0, -1.0}) {
            const hl::HeunTau t{rng.uniform(-1, 1), c, -c, rng.uniform(-1, 1), sign * c};
            const auto [c1, c2] = hl::cubic_closure_hahn(t, p);
            checks.add(std::string("algebra/cubic-vanishing-") +
                           (sign > 0 ? "plus" : "minus"),
                       std::max(std::abs(c2.coefficients[0]),
                                std::abs(c2.coefficients[1])),
                       1e-9 * ts);
        }
    }

    {
        const hl::JacobiParams p{rng.uniform(-0.9, 3.0), rng.uniform(-0.9, 3.0)};
        const hl::HeunTau t{0.0, rng.uniform(0.3, 1.0), rng.uniform(0.3, 1.0),
                            rng.uniform(-1, 1), 0.0};
        const auto [e1, e2] = hl::racah_embedding_jacobi(t, p, 16);
        checks.add("algebra/racah-embedding", std::max(e1.residual, e2.residual),
                   1e-8 * ts);
    }
}

void suite_limiting(Draws& rng, double ts, CheckSet& checks) {
    const hl::HahnParams p{rng.uniform(-0.9, 3.0), rng.uniform(-0.9, 3.0), 8};
    const hl::HahnBasis basis = hl::hahn_basis(p);

    double worst_comm = 0.0;
    for (int j1 = 0; j1 < 8; ++j1)
        for (int j2 = 0; j2 < 8; ++j2) {
            const hl::CommutingSolution sol = hl::commuting_tau({p, j1, j2}, basis);
            const double m_norm = hl::frobenius_norm(sol.m_matrix);
            worst_comm = std::max({worst_comm, sol.commutator_residuals.first / m_norm,
                                   sol.commutator_residuals.second / m_norm});
        }
    checks.add("limiting/commutator-sweep", worst_comm, 1e-10 * ts);

    double route = 0.0, direct = 0.0;
    for (const auto& [j1, j2] : {std::pair{3, 4}, std::pair{6, 2}}) {
        const hl::KernelMatrix k = hl::kernel_matrix({p, j1, j2}, basis);
        route = std::max(route, k.route_gap);
        direct = std::max(direct, k.direct_gap);
    }
    checks.add("limiting/kernel-routes", route, 1e-10 * ts);
    checks.add("limiting/kernel-direct", direct, 1e-10 * ts);

    int idx = 0;
    for (const auto& [j1, j2] : {std::pair{3, 4}, std::pair{5, 2}, std::pair{7, 6}}) {
        const hl::SpectralReport rep = hl::solve({p, j1, j2}, basis);
        double gap = 0.0;
        for (std::size_t i = 0; i < rep.v1_eigs_direct.size(); ++i)
            gap = std::max(gap, std::abs(rep.v1_eigs_direct[i] - rep.v1_eigs_via_m[i]));
        checks.add("limiting/eig-match-" + std::to_string(idx), gap, 1e-9 * ts);
        checks.add("limiting/eigvec-angles-" + std::to_string(idx),
                   rep.eigenvector_agreement, 1e-7 * ts);
        ++idx;
    }

    {
        const hl::SpectralReport rep = hl::solve({p, 3, 8}, basis);
        double gap = 0.0;
        for (std::size_t i = 0; i < rep.v1_eigs_direct.size(); ++i)
            gap = std::max({gap, std::abs(rep.v1_eigs_direct[i] - 1.0),
                            std::abs(rep.v1_eigs_via_m[i] - 1.0)});
        checks.add("limiting/full-band-projector", gap, 1e-12 * ts);
    }
    {
        const auto [p1, p2] = hl::projections({p, 8, 8}, basis);
        const hl::Matrix v1 = hl::limiting_ops(p1, p2).v1.matrix;
        checks.add("limiting/no-restriction-identity",
                   hl::max_abs(v1 - hl::Matrix::identity(9)), 1e-12 * ts);
    }
}

struct VerifyOpts {
    std::string suite = "all";
    std::uint64_t seed = 42;
};

int run_verify(const VerifyOpts& o, const OutputOpts& out) {
    Json config = Json::object()
                      .set("command", Json::text("verify"))
                      .set("suite", Json::text(o.suite))
                      .set("seed", Json::integer(static_cast<long long>(o.seed)))
                      .set("format", Json::text(out.format))
                      .set("tol_scale", Json::number(out.tol_scale));
    return guarded(config, out, [&]() {
        Stopwatch watch;
        Json timings = Json::object();
        CheckSet checks;
        Draws rng(o.seed);
        const double ts = out.tol_scale;
        const bool all = o.suite == "all";

        if (all || o.suite == "orthopoly") {
            suite_orthopoly(rng, ts, checks);
            watch.lap(timings, "orthopoly_s", out.timings);
        }
        if (all || o.suite == "heun") {
            suite_heun(rng, ts, checks);
            watch.lap(timings, "heun_s", out.timings);
        }
        if (all || o.suite == "algebra") {
            suite_algebra(rng, ts, checks);
            watch.lap(timings, "algebra_s", out.timings);
        }
        if (all || o.suite == "limiting") {
            suite_limiting(rng, ts, checks);
            watch.lap(timings, "limiting_s", out.timings);
        }

        Json results = Json::object()
                           .set("all_pass", Json::boolean(checks.all_pass))
                           .set("checks", std::move(checks.rows));
        const int rc = emit(assemble(std::move(config), std::move(results),
                                     std::move(checks.residuals), std::move(timings)),
                            out);
        if (rc != exit_ok) return rc;
        return checks.all_pass ? exit_ok : exit_tolerance;
    });
}

void attach_output_opts(CLI::App* cmd, OutputOpts& out) {
    cmd->add_option("-o,--output", out.path, "Write the artifact to this path (default stdout)");
    cmd->add_option("--format", out.format, "Artifact format")
        ->check(CLI::IsMember({"json", "csv"}))
        ->capture_default_str();
    cmd->add_option("--tol-scale", out.tol_scale,
                    "Multiply every check tolerance by this factor")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    cmd->add_flag("--timings", out.timings, "Record wall-clock phase timings");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Algebraic Heun operators and discrete time-and-band limiting"};
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    LimitOpts solve_opts;
    OutputOpts solve_out;
    CLI::App* solve_cmd =
        app.add_subcommand("solve", "Diagonalize the restricted projection through the commuting operator");
    solve_cmd->add_option("--n", solve_opts.n, "Grid cutoff N")->required();
    solve_cmd->add_option("--alpha", solve_opts.alpha, "Weight exponent alpha");
    solve_cmd->add_option("--beta", solve_opts.beta, "Weight exponent beta");
    solve_cmd->add_option("--j1", solve_opts.j1, "Grid window 0..J1")->required();
    solve_cmd->add_option("--j2", solve_opts.j2, "Degree window 0..J2")->required();
    attach_output_opts(solve_cmd, solve_out);

    LimitOpts spectrum_opts;
    OutputOpts spectrum_out;
    CLI::App* spectrum_cmd =
        app.add_subcommand("spectrum", "Emit V1 and M spectra with clustering diagnostics");
    spectrum_cmd->add_option("--n", spectrum_opts.n, "Grid cutoff N")->required();
    spectrum_cmd->add_option("--alpha", spectrum_opts.alpha, "Weight exponent alpha");
    spectrum_cmd->add_option("--beta", spectrum_opts.beta, "Weight exponent beta");
    spectrum_cmd->add_option("--j1", spectrum_opts.j1, "Grid window 0..J1")->required();
    spectrum_cmd->add_option("--j2", spectrum_opts.j2, "Degree window 0..J2")->required();
    attach_output_opts(spectrum_cmd, spectrum_out);

    LimitOpts kernel_opts;
    OutputOpts kernel_out;
    CLI::App* kernel_cmd =
        app.add_subcommand("kernel", "Evaluate the discrete kernel by its three summations");
    kernel_cmd->add_option("--n", kernel_opts.n, "Grid cutoff N")->required();
    kernel_cmd->add_option("--alpha", kernel_opts.alpha, "Weight exponent alpha");
    kernel_cmd->add_option("--beta", kernel_opts.beta, "Weight exponent beta");
    kernel_cmd->add_option("--j1", kernel_opts.j1, "Grid window 0..J1 (default N)");
    kernel_cmd->add_option("--j2", kernel_opts.j2, "Degree window 0..J2 (default N)");
    attach_output_opts(kernel_cmd, kernel_out);

    ActionOpts action_opts;
    OutputOpts action_out;
    CLI::App* action_cmd =
        app.add_subcommand("heun-action", "Tridiagonal band table and degree-raising report");
    action_cmd->add_option("--degree-cap", action_opts.degree_cap, "Monomial degree cutoff")
        ->capture_default_str();
    action_cmd->add_option("--alpha", action_opts.alpha, "Weight exponent alpha");
    action_cmd->add_option("--beta", action_opts.beta, "Weight exponent beta");
    action_cmd->add_option("--tau", action_opts.tau, "Coefficients t0 t1 t2 t3 t4")
        ->expected(5)
        ->required();
    attach_output_opts(action_cmd, action_out);

    AlgebraOpts algebra_opts;
    OutputOpts algebra_out;
    CLI::App* algebra_cmd =
        app.add_subcommand("algebra-check", "Fit the quadratic and cubic closure relations");
    algebra_cmd->add_option("--n", algebra_opts.n, "Grid cutoff N")->capture_default_str();
    algebra_cmd->add_option("--alpha", algebra_opts.alpha, "Weight exponent alpha");
    algebra_cmd->add_option("--beta", algebra_opts.beta, "Weight exponent beta");
    algebra_cmd->add_option("--tau", algebra_opts.tau,
                            "Coefficients t0 t1 t2 t3 t4 for the cubic relations")
        ->expected(5);
    attach_output_opts(algebra_cmd, algebra_out);

    VerifyOpts verify_opts;
    OutputOpts verify_out;
    CLI::App* verify_cmd =
        app.add_subcommand("verify", "Run an invariant suite with seeded random draws");
    verify_cmd->add_option("--suite", verify_opts.suite, "Which suite to run")
        ->check(CLI::IsMember({"all", "orthopoly", "heun", "algebra", "limiting"}))
        ->capture_default_str();
    verify_cmd->add_option("--seed", verify_opts.seed, "Seed for the random draws")
        ->capture_default_str();
    attach_output_opts(verify_cmd, verify_out);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help, --version
        app.exit(e);
        Json doc = Json::object();
        doc.set("error", Json::object()
                             .set("kind", Json::text("bad_input"))
                             .set("message", Json::text(e.what()))
                             .set("exit_code", Json::integer(exit_bad_input)));
        doc.set("version", Json::text(kVersion));
        const std::string body = doc.render_json();
        std::fwrite(body.data(), 1, body.size(), stdout);
        return exit_bad_input;
    }

    if (const char* env = std::getenv("HEUNLIM_SEED")) {
        char* end = nullptr;
        const unsigned long long v = std::strtoull(env, &end, 10);
        if (end == env || *end != '\0') {
            std::fprintf(stderr, "heunlim: HEUNLIM_SEED is not an integer: '%s'\n", env);
            return exit_bad_input;
        }
        verify_opts.seed = v;
    }

    if (solve_cmd->parsed()) return run_solve(solve_opts, solve_out, false);
    if (spectrum_cmd->parsed()) return run_solve(spectrum_opts, spectrum_out, true);
    if (kernel_cmd->parsed()) return run_kernel(kernel_opts, kernel_out);
    if (action_cmd->parsed()) return run_heun_action(action_opts, action_out);
    if (algebra_cmd->parsed()) return run_algebra_check(algebra_opts, algebra_out);
    if (verify_cmd->parsed()) return run_verify(verify_opts, verify_out);
    return exit_bad_input;
}
