#include "romfsm/fsm.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>

namespace romfsm {

SensitivityState SensitivityState::initial(int r, int p, bool track_initial_condition) {
    SensitivityState s;
    s.v = Mat::Zero(r, p);
    if (track_initial_condition) s.u = Mat::Identity(r, r);
    return s;
}

void AssimilationConfig::validate() const {
    if (!(window > 0.0)) throw ConfigError("AssimilationConfig: window must be positive");
    if (!(tol > 0.0)) throw ConfigError("AssimilationConfig: tol must be positive");
    if (max_iter < 1) throw ConfigError("AssimilationConfig: max_iter must be >= 1");
    for (long i = 0; i < obs_times.size(); ++i)
        if (obs_times(i) < -1e-12 || obs_times(i) > window * (1.0 + 1e-9))
            throw ConfigError("AssimilationConfig: observation times must lie in [0, window]");
}

std::pair<Mat, Mat> continuous_jacobians(const GromModel& model, const Vec& a,
                                         const EddyViscosity& nu_e) {
    if (a.size() != model.r) throw ConfigError("continuous_jacobians: coefficient mismatch");
    nu_e.validate(model.r);
    const int r = model.r;

    Mat d_a = model.l.transpose();
    if (nu_e.mode == EddyViscosity::Mode::global)
        d_a += nu_e.values(0) * model.l_hat.transpose();
    else
        d_a += nu_e.values.asDiagonal() * model.l_hat.transpose();
    for (int k = 0; k < r; ++k)
        d_a.row(k) += ((model.n3[k] + model.n3[k].transpose()) * a).transpose();

    const Vec closure = model.b_hat + model.l_hat.transpose() * a;
    Mat d_nu;
    if (nu_e.mode == EddyViscosity::Mode::global)
        d_nu = closure;
    else
        d_nu = Mat(closure.asDiagonal());
    return {std::move(d_a), std::move(d_nu)};
}

std::pair<Vec, DiscreteMapJacobians> rk4_step_with_jacobians(const GromModel& model,
                                                             const Vec& a,
                                                             const EddyViscosity& nu_e,
                                                             double dt) {
    if (!(dt > 0.0)) throw ConfigError("rk4_step_with_jacobians: dt must be positive");
    const int r = model.r;
    const int p = nu_e.dim();

    auto staged = [&](const Vec& state) {
        auto [da, dnu] = continuous_jacobians(model, state, nu_e);
        Mat df(r, r + p);
        df << da, dnu;
        return df;
    };

    const Vec g1 = grom_rhs(model, a, nu_e);
    const Mat dg1 = staged(a);

    const Vec a2 = a + 0.5 * dt * g1;
    const Vec g2 = grom_rhs(model, a2, nu_e);
    Mat df = staged(a2);
    const Mat dg2 = df + 0.5 * dt * (df.leftCols(r) * dg1);

    const Vec a3 = a + 0.5 * dt * g2;
    const Vec g3 = grom_rhs(model, a3, nu_e);
    df = staged(a3);
    const Mat dg3 = df + 0.5 * dt * (df.leftCols(r) * dg2);

    const Vec a4 = a + dt * g3;
    const Vec g4 = grom_rhs(model, a4, nu_e);
    df = staged(a4);
    const Mat dg4 = df + dt * (df.leftCols(r) * dg3);

    Mat total = (dt / 6.0) * (dg1 + 2.0 * dg2 + 2.0 * dg3 + dg4);
    total.leftCols(r) += Mat::Identity(r, r);

    DiscreteMapJacobians jac;
    jac.d_a = total.leftCols(r);
    jac.d_nu = total.rightCols(p);
    Vec a_next = a + (dt / 6.0) * (g1 + 2.0 * g2 + 2.0 * g3 + g4);
    return {std::move(a_next), std::move(jac)};
}

void propagate_sensitivities(SensitivityState& state, const DiscreteMapJacobians& jac) {
    if (state.v.rows() != jac.d_a.rows() || state.v.cols() != jac.d_nu.cols())
        throw ConfigError("propagate_sensitivities: dimension mismatch");
    state.v = jac.d_a * state.v + jac.d_nu;
    if (state.u) *state.u = jac.d_a * (*state.u);
}

namespace {

// Stacks the per-observation blocks, rows scaled by 1/sigma (R = sigma^2 I).
std::pair<Mat, Vec> stack_blocks(const std::vector<Mat>& h_blocks,
                                 const std::vector<Vec>& e_blocks, double sigma) {
    if (h_blocks.empty() || h_blocks.size() != e_blocks.size())
        throw ConfigError("assemble_and_solve: need matching, non-empty block lists");
    const long p = h_blocks.front().cols();
    long rows = 0;
    for (std::size_t i = 0; i < h_blocks.size(); ++i) {
        if (h_blocks[i].cols() != p)
            throw ConfigError("assemble_and_solve: inconsistent column counts");
        if (h_blocks[i].rows() != e_blocks[i].size())
            throw ConfigError("assemble_and_solve: block row mismatch");
        rows += h_blocks[i].rows();
    }
    Mat h(rows, p);
    Vec e(rows);
    long at = 0;
    for (std::size_t i = 0; i < h_blocks.size(); ++i) {
        h.middleRows(at, h_blocks[i].rows()) = h_blocks[i];
        e.segment(at, e_blocks[i].size()) = e_blocks[i];
        at += h_blocks[i].rows();
    }
    const double w = sigma > 0.0 ? 1.0 / sigma : 1.0;
    h *= w;
    e *= w;
    return {std::move(h), std::move(e)};
}

// Marquardt-damped solve: min ||H d - e||^2 + lambda ||D^(1/2) d||^2 with
// D = diag(H^T H). The scaling keeps the solution independent of sigma, like
// the undamped formula. lambda = 0 falls back to the plain solve.
Vec damped_solve(const Mat& h, const Vec& e, double lambda) {
    const long p = h.cols();
    Mat aug(h.rows() + p, p);
    aug.topRows(h.rows()) = h;
    aug.bottomRows(p).setZero();
    for (long j = 0; j < p; ++j)
        aug(h.rows() + j, j) = std::sqrt(lambda) * h.col(j).norm();
    Vec rhs = Vec::Zero(h.rows() + p);
    rhs.head(h.rows()) = e;
    Eigen::CompleteOrthogonalDecomposition<Mat> cod(aug);
    return cod.solve(rhs);
}

}  // namespace

Vec assemble_and_solve(const std::vector<Mat>& h_blocks, const std::vector<Vec>& e_blocks,
                       double sigma) {
    auto [h, e] = stack_blocks(h_blocks, e_blocks, sigma);

    Eigen::CompleteOrthogonalDecomposition<Mat> cod(h);
    if (h.rows() >= h.cols() && cod.rank() < h.cols())
        throw NumericalError("assemble_and_solve: singular normal equations (rank " +
                             std::to_string(cod.rank()) + " < " + std::to_string(h.cols()) +
                             ")");
    return cod.solve(e);
}

namespace {

// Cap on consecutive rejected steps before the iteration is declared failed.
constexpr int kMaxRejections = 12;

long obs_step_index(double t, double dt, long max_step) {
    const long idx = std::llround(t / dt);
    if (std::abs(idx * dt - t) > 1e-9 * std::max(1.0, std::abs(t)))
        throw ConfigError("estimate_eddy_viscosity: observation time " + std::to_string(t) +
                          " does not lie on the trajectory time grid");
    if (idx < 0 || idx > max_step)
        throw ConfigError("estimate_eddy_viscosity: observation time outside the window");
    return idx;
}

}  // namespace

AssimilationResult estimate_eddy_viscosity(const GromModel& model, const Vec& a0,
                                           const ObservationSet& obs,
                                           const ObservationOperator& op,
                                           const AssimilationConfig& cfg,
                                           const EddyViscosity& nu0, double dt) {
    cfg.validate();
    nu0.validate(model.r);
    if (a0.size() != model.r) throw ConfigError("estimate_eddy_viscosity: a0 length mismatch");
    if (obs.times.size() == 0)
        throw ConfigError("estimate_eddy_viscosity: no observations supplied");
    if (obs.times.size() != obs.values.cols())
        throw ConfigError("estimate_eddy_viscosity: observation set malformed");

    const int r = model.r;
    const int p_nu = nu0.dim();
    const bool with_ic = cfg.include_initial_condition;
    const long window_steps = std::llround(cfg.window / dt);

    // step index -> observation column
    std::vector<long> obs_step(obs.times.size());
    for (long j = 0; j < obs.times.size(); ++j)
        obs_step[j] = obs_step_index(obs.times(j), dt, window_steps);

    AssimilationResult result;
    result.nu_e = nu0;
    result.a0 = a0;

    const Mat dh = op.jacobian(r);

    // Damped Gauss-Newton: a window whose forecast error got worse (or went
    // non-finite) rejects the previous update; the step is re-solved from the
    // last accepted iterate with a raised Marquardt parameter. lambda decays
    // again after accepted steps, so a well-behaved problem runs the plain
    // update throughout.
    int reject_budget = kMaxRejections;
    Vec last_delta;
    double accepted_obj = std::numeric_limits<double>::infinity();
    Mat accepted_h;
    Vec accepted_e;
    double lambda = 0.0;

    auto apply = [&](const Vec& delta) {
        if (with_ic) {
            result.a0 += delta.head(r);
            result.nu_e.values += delta.tail(p_nu);
        } else {
            result.nu_e.values += delta;
        }
        last_delta = delta;
        result.delta_history.push_back(delta.lpNorm<Eigen::Infinity>());
    };
    auto roll_back = [&]() {
        if (with_ic) {
            result.a0 -= last_delta.head(r);
            result.nu_e.values -= last_delta.tail(p_nu);
        } else {
            result.nu_e.values -= last_delta;
        }
    };

    for (int iter = 1; iter <= cfg.max_iter; ++iter) {
        result.iterations = iter;

        Vec a = result.a0;
        SensitivityState sens = SensitivityState::initial(r, p_nu, with_ic);

        std::vector<Mat> h_blocks;
        std::vector<Vec> e_blocks;
        double ef_sq = 0.0;
        bool diverged = false;

        auto collect = [&](long step) {
            for (long j = 0; j < static_cast<long>(obs_step.size()); ++j) {
                if (obs_step[j] != step) continue;
                // At t = t0 the parameter sensitivity is exactly zero; without
                // the initial condition in the control the whole block is a
                // zero row and is skipped.
                if (step == 0 && !with_ic) continue;
                const Vec e = op.innovation(obs.values.col(j), a);
                Mat block(dh.rows(), with_ic ? r + p_nu : p_nu);
                if (with_ic) {
                    block.leftCols(r) = dh * (*sens.u);
                    block.rightCols(p_nu) = dh * sens.v;
                } else {
                    block = dh * sens.v;
                }
                if (!e.allFinite() || !block.allFinite()) {
                    diverged = true;
                    return;
                }
                h_blocks.push_back(std::move(block));
                e_blocks.push_back(e);
                ef_sq += e.squaredNorm();
            }
        };

        collect(0);
        for (long step = 0; step < window_steps && !diverged; ++step) {
            auto [a_next, jac] = rk4_step_with_jacobians(model, a, result.nu_e, dt);
            a = std::move(a_next);
            if (!a.allFinite()) {
                diverged = true;
                break;
            }
            propagate_sensitivities(sens, jac);
            collect(step + 1);
        }

        // A step is kept only when it meaningfully reduces the forecast
        // error; diverged, worse, or plateaued windows re-solve from the last
        // accepted iterate with raised damping until the step drops below tol.
        const bool improved = !diverged && ef_sq < accepted_obj * (1.0 - 1e-4);
        if (!improved) {
            result.forecast_error_norms.push_back(
                diverged ? std::numeric_limits<double>::quiet_NaN() : std::sqrt(ef_sq));
            if (reject_budget > 0 && last_delta.size() > 0) {
                --reject_budget;
                roll_back();
                lambda = std::max(10.0 * lambda, 1e-4);
                const Vec delta = damped_solve(accepted_h, accepted_e, lambda);
                apply(delta);
                result.notes.push_back("iteration " + std::to_string(iter) +
                                       (diverged ? ": trajectory diverged"
                                                 : ": forecast error did not improve") +
                                       "; re-solved with damping " + std::to_string(lambda));
                if (result.delta_history.back() <= cfg.tol) {
                    result.converged = true;
                    break;
                }
                continue;
            }
            if (last_delta.size() > 0) roll_back();
            result.converged = false;
            result.notes.push_back("iteration " + std::to_string(iter) +
                                   (diverged ? ": trajectory diverged; aborting"
                                             : ": no acceptable step; aborting"));
            return result;
        }

        if (h_blocks.empty())
            throw NumericalError("estimate_eddy_viscosity: no usable observation blocks");

        Vec delta;
        try {
            auto [h, e] = stack_blocks(h_blocks, e_blocks, obs.sigma);
            if (lambda <= 0.0) {
                Eigen::CompleteOrthogonalDecomposition<Mat> cod(h);
                if (h.rows() >= h.cols() && cod.rank() < h.cols())
                    throw NumericalError(
                        "assemble_and_solve: singular normal equations (rank " +
                        std::to_string(cod.rank()) + " < " + std::to_string(h.cols()) + ")");
                delta = cod.solve(e);
            } else {
                delta = damped_solve(h, e, lambda);
            }
            accepted_h = std::move(h);
            accepted_e = std::move(e);
        } catch (const NumericalError& err) {
            result.converged = false;
            result.notes.push_back(std::string("iteration ") + std::to_string(iter) + ": " +
                                   err.what());
            return result;
        }

        accepted_obj = ef_sq;
        reject_budget = kMaxRejections;
        lambda = lambda <= 1e-12 ? 0.0 : 0.1 * lambda;
        apply(delta);
        result.forecast_error_norms.push_back(std::sqrt(ef_sq));

        if (result.delta_history.back() <= cfg.tol) {
            result.converged = true;
            break;
        }
    }

    if (result.nu_e.values.minCoeff() < 0.0)
        result.notes.push_back("estimated eddy viscosity has negative component(s); "
                               "reported unclamped");
    return result;
}

void write_assimilation_report(const AssimilationResult& result, const std::string& txt_path,
                               const std::string& csv_path) {
    const int p = result.nu_e.dim();
    {
        std::ofstream out(txt_path);
        out << "Eddy viscosity estimation ("
            << (result.nu_e.mode == EddyViscosity::Mode::global ? "global" : "per-mode")
            << ")\n";
        out << "converged: " << (result.converged ? "yes" : "no")
            << "   iterations: " << result.iterations << "\n";
        out << "final nu_e:";
        for (int k = 0; k < p; ++k) out << ' ' << std::setprecision(12) << result.nu_e.values(k);
        out << "\n\n";
        out << std::left << std::setw(6) << "iter" << std::setw(18) << "||delta||_inf"
            << std::setw(18) << "||e_F||" << "\n";
        for (std::size_t i = 0; i < result.delta_history.size(); ++i) {
            out << std::left << std::setw(6) << (i + 1) << std::setw(18)
                << result.delta_history[i] << std::setw(18) << result.forecast_error_norms[i]
                << "\n";
        }
        for (const auto& note : result.notes) out << "note: " << note << "\n";
    }
    {
        std::ofstream out(csv_path);
        out << "iter,delta_inf,ef_norm\n";
        char buf[64];
        for (std::size_t i = 0; i < result.delta_history.size(); ++i) {
            std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g\n", i + 1, result.delta_history[i],
                          result.forecast_error_norms[i]);
            out << buf;
        }
    }
}

}  // namespace romfsm
