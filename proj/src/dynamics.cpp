#include "kuramoto/dynamics.hpp"

#include <array>

#include "kuramoto/geometry.hpp"
#include "kuramoto/quadrature.hpp"

namespace kuramoto {

namespace {

using Complex = std::complex<double>;

// drift a single oscillator receives from a block order parameter;
// shared between the uniform phase model and the sub-ensemble model so the
// two agree bitwise on identical data
inline double uniform_drift_term(Complex block_z, double phi, double k, double beta) {
    return k * std::imag(block_z * std::polar(1.0, -(phi + beta)));
}

inline Complex block_order_parameter(const VectorXd& phases) {
    Complex z(0.0, 0.0);
    for (int i = 0; i < phases.size(); ++i) z += std::polar(1.0, phases[i]);
    return z / static_cast<double>(phases.size());
}

}  // namespace

// ---------------------------------------------------------------------------
// constructors
// ---------------------------------------------------------------------------

PhaseEnsemble PhaseEnsemble::symmetric(VectorXd phases, double omega, MatrixXd k, MatrixXd beta,
                                       double noise_kappa) {
    const int n = static_cast<int>(phases.size());
    if (k.rows() != n || k.cols() != n || beta.rows() != n || beta.cols() != n)
        throw DimensionMismatch("PhaseEnsemble::symmetric: matrix sizes must be N x N");
    if ((k - k.transpose()).norm() > 1e-12 || (beta - beta.transpose()).norm() > 1e-12)
        throw InvalidParams("PhaseEnsemble::symmetric: K and beta must be symmetric");
    if (noise_kappa < 0.0) throw InvalidNoiseParameter("noise_kappa must be >= 0");
    PhaseEnsemble m;
    for (int i = 0; i < n; ++i) phases[i] = wrap_angle(phases[i]);
    m.phases = std::move(phases);
    m.omega = omega;
    m.coupling = DenseCoupling{std::move(k), std::move(beta)};
    m.noise_kappa = noise_kappa;
    return m;
}

// ---------------------------------------------------------------------------
// right-hand sides
// ---------------------------------------------------------------------------

VectorXd phase_rhs(const PhaseEnsemble& m) {
    const int n = m.n();
    VectorXd out(n);
    if (const auto* u = std::get_if<UniformCoupling>(&m.coupling)) {
        const Complex z = block_order_parameter(m.phases);
        for (int j = 0; j < n; ++j)
            out[j] = m.omega + uniform_drift_term(z, m.phases[j], u->k, u->beta);
    } else {
        const auto& c = std::get<DenseCoupling>(m.coupling);
        if (c.k.rows() != n || c.beta.rows() != n)
            throw DimensionMismatch("phase_rhs: coupling size mismatch");
        for (int j = 0; j < n; ++j) {
            double acc = 0.0;
            for (int i = 0; i < n; ++i)
                acc += c.k(i, j) * std::sin(m.phases[i] - m.phases[j] - c.beta(i, j));
            out[j] = m.omega + acc / n;
        }
    }
    return out;
}

VectorXcd global_circle_rhs(const GlobalCircleModel& m) {
    const int n = static_cast<int>(m.z.size());
    Complex conj_sum(0.0, 0.0);
    for (int i = 0; i < n; ++i) conj_sum += std::conj(m.z[i]);
    const Complex f = Complex(0.0, 0.5 * m.k / n) * std::polar(1.0, m.beta) * conj_sum;
    VectorXcd out(n);
    for (int j = 0; j < n; ++j)
        out[j] = Complex(0.0, 1.0) * (f * m.z[j] * m.z[j] + m.omega * m.z[j] + std::conj(f));
    return out;
}

std::vector<VectorXd> subensemble_rhs(const SubEnsembleModel& m) {
    const int d = m.blocks();
    if (m.k.rows() != d || m.beta.rows() != d)
        throw DimensionMismatch("subensemble_rhs: coupling size mismatch");
    std::vector<Complex> z(d);
    for (int b = 0; b < d; ++b) z[b] = block_order_parameter(m.groups[b]);
    std::vector<VectorXd> out(d);
    for (int l = 0; l < d; ++l) {
        out[l].resize(m.groups[l].size());
        for (int j = 0; j < m.groups[l].size(); ++j) {
            double acc = m.omega;
            for (int kb = 0; kb < d; ++kb)
                acc += uniform_drift_term(z[kb], m.groups[l][j], m.k(kb, l), m.beta(kb, l));
            out[l][j] = acc;
        }
    }
    return out;
}

namespace {

std::vector<VectorXd> sphere_coupling_fields(const SphereEnsemble& m) {
    const int n = m.n(), d = m.dim();
    std::vector<VectorXd> f(n, VectorXd::Zero(d));
    if (const auto* g = std::get_if<SphereGlobalCoupling>(&m.coupling)) {
        VectorXd mean = VectorXd::Zero(d);
        for (const auto& x : m.states) mean += x;
        mean *= g->k / n;
        for (int j = 0; j < n; ++j) f[j] = mean;
    } else if (const auto* dc = std::get_if<SphereDenseCoupling>(&m.coupling)) {
        if (dc->k.rows() != n) throw DimensionMismatch("sphere coupling size mismatch");
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) f[j] += dc->k(i, j) * m.states[i];
            f[j] /= n;
        }
    } else {
        const auto& sc = std::get<SphereSubCoupling>(m.coupling);
        const int nd = static_cast<int>(sc.block_sizes.size());
        if (sc.k.rows() != nd) throw DimensionMismatch("sub-ensemble coupling size mismatch");
        // block sums
        std::vector<VectorXd> sums(nd, VectorXd::Zero(d));
        int at = 0;
        for (int b = 0; b < nd; ++b) {
            for (int i = 0; i < sc.block_sizes[b]; ++i) sums[b] += m.states[at + i];
            at += sc.block_sizes[b];
        }
        if (at != n) throw DimensionMismatch("sub-ensemble block sizes do not add up");
        // f^l = (1/D) sum_i (K_il / N_i) Q_il sum_j x_j^i
        std::vector<VectorXd> fl(nd, VectorXd::Zero(d));
        for (int l = 0; l < nd; ++l) {
            for (int i = 0; i < nd; ++i) {
                VectorXd term = sums[i] * (sc.k(i, l) / sc.block_sizes[i]);
                if (!sc.q.empty()) term = sc.q[i * nd + l] * term;
                fl[l] += term;
            }
            fl[l] /= nd;
        }
        at = 0;
        for (int b = 0; b < nd; ++b) {
            for (int i = 0; i < sc.block_sizes[b]; ++i) f[at + i] = fl[b];
            at += sc.block_sizes[b];
        }
    }
    return f;
}

}  // namespace

std::vector<VectorXd> sphere_rhs(const SphereEnsemble& m) {
    const int n = m.n();
    std::vector<VectorXd> f = sphere_coupling_fields(m);
    std::vector<VectorXd> out(n);
    for (int j = 0; j < n; ++j) {
        const VectorXd& x = m.states[j];
        out[j] = m.a * x + f[j] - x.dot(f[j]) * x;
    }
    return out;
}

std::vector<VectorXcd> complex_sphere_rhs(const ComplexSphereEnsemble& m) {
    const int n = m.n(), d = m.dim();
    std::vector<VectorXcd> g(n, VectorXcd::Zero(d));
    if (const auto* gc = std::get_if<SphereGlobalCoupling>(&m.coupling)) {
        VectorXcd mean = VectorXcd::Zero(d);
        for (const auto& x : m.states) mean += x;
        mean *= gc->k / static_cast<double>(n);
        for (int j = 0; j < n; ++j) g[j] = mean;
    } else {
        const auto& dc = std::get<SphereDenseCoupling>(m.coupling);
        if (dc.k.rows() != n) throw DimensionMismatch("complex sphere coupling size mismatch");
        for (int j = 0; j < n; ++j) {
            for (int i = 0; i < n; ++i) g[j] += dc.k(i, j) * m.states[i];
            g[j] /= static_cast<double>(n);
        }
    }
    std::vector<VectorXcd> out(n);
    for (int j = 0; j < n; ++j) {
        const VectorXcd& zj = m.states[j];
        // <zeta, g>_C = sum_k zeta_k conj(g_k)
        const Complex ip = (g[j].adjoint() * zj)(0, 0);
        out[j] = m.h * zj + g[j] - ip * zj;
    }
    return out;
}

namespace {

// Omega_j = J + (1/2N) (W_j Q_j^T - Q_j W_j^T), W_j = sum_i K_ij Q_i
template <class Mat>
std::vector<Mat> matrix_algebra_elements(const std::vector<Mat>& q, const Mat& freq,
                                         const MatrixXd& k) {
    const int n = static_cast<int>(q.size());
    const int d = static_cast<int>(q[0].rows());
    std::vector<Mat> omega(n);
    Mat w(d, d), p(d, d);
    for (int j = 0; j < n; ++j) {
        w.setZero();
        for (int i = 0; i < n; ++i) w += k(i, j) * q[i];
        p.noalias() = w * q[j].adjoint();
        omega[j] = freq + (p - p.adjoint()) / (2.0 * n);
    }
    return omega;
}

template <class Mat>
std::vector<Mat> matrix_rhs_impl(const std::vector<Mat>& q, const Mat& freq, const MatrixXd& k) {
    auto omega = matrix_algebra_elements(q, freq, k);
    std::vector<Mat> out(q.size());
    for (std::size_t j = 0; j < q.size(); ++j) out[j] = omega[j] * q[j];
    return out;
}

}  // namespace

std::vector<MatrixXd> so_rhs(const SoEnsemble& m) {
    if (m.k.rows() != m.n()) throw DimensionMismatch("so_rhs: coupling size mismatch");
    return matrix_rhs_impl(m.states, m.freq, m.k);
}

std::vector<MatrixXcd> unitary_rhs(const UnitaryEnsemble& m) {
    if (m.k.rows() != m.n()) throw DimensionMismatch("unitary_rhs: coupling size mismatch");
    return matrix_rhs_impl(m.states, m.freq, m.k);
}

// ---------------------------------------------------------------------------
// multiplicative noise amplitude
// ---------------------------------------------------------------------------

namespace {

// cosine coefficients of sqrt(1 + C cos t); cached for the last C
const std::vector<double>& sqrt_kernel_coefficients(double c) {
    thread_local double cached_c = NAN;
    thread_local std::vector<double> coef;
    if (!(cached_c == c)) {
        coef.clear();
        for (int m = 0; m < 96; ++m) {
            const double cm =
                adaptive_simpson(
                    [&](double t) { return std::sqrt(1.0 + c * std::cos(t)) * std::cos(m * t); },
                    0.0, M_PI, 1e-13) *
                (m == 0 ? 1.0 : 2.0) / M_PI;
            coef.push_back(cm);
            if (m > 4 && std::abs(cm) < 1e-13) break;
        }
        cached_c = c;
    }
    return coef;
}

}  // namespace

VectorXd multiplicative_noise_amplitude(const VectorXd& phases, double c) {
    if (std::abs(c) > 1.0) throw InvalidNoiseParameter("multiplicative noise needs |C| <= 1");
    const int n = static_cast<int>(phases.size());
    if (c == 0.0) return VectorXd::Ones(n);
    const auto& coef = sqrt_kernel_coefficients(c);
    const int nm = static_cast<int>(coef.size());
    // harmonic sums A_m + i B_m = (1/N) sum_i e^{i m phi_i} via power recurrence
    std::vector<Complex> unit(n);
    for (int i = 0; i < n; ++i) unit[i] = std::polar(1.0, phases[i]);
    std::vector<Complex> mom(nm, Complex(0.0, 0.0));
    {
        std::vector<Complex> pw(n, Complex(1.0, 0.0));
        for (int m = 1; m < nm; ++m) {
            Complex s(0.0, 0.0);
            for (int i = 0; i < n; ++i) {
                pw[i] *= unit[i];
                s += pw[i];
            }
            mom[m] = s / static_cast<double>(n);
        }
    }
    VectorXd amp(n);
    for (int i = 0; i < n; ++i) {
        double s = coef[0];
        Complex pw(1.0, 0.0);
        for (int m = 1; m < nm; ++m) {
            pw *= std::conj(unit[i]);
            // cos(m phi_i) A_m + sin(m phi_i) B_m = Re(conj(e^{i m phi_i}) mom_m)
            s += coef[m] * std::real(pw * mom[m]);
        }
        amp[i] = s;
    }
    return amp;
}

// ---------------------------------------------------------------------------
// flat-vector integrator plumbing
// ---------------------------------------------------------------------------

namespace {

template <class Model>
struct Flat;

template <>
struct Flat<PhaseEnsemble> {
    static VectorXd pack(const PhaseEnsemble& m) { return m.phases; }
    static void unpack(const VectorXd& x, PhaseEnsemble& m) { m.phases = x; }
    static VectorXd rhs(const PhaseEnsemble& m) { return phase_rhs(m); }
};

template <>
struct Flat<GlobalCircleModel> {
    static VectorXd pack(const GlobalCircleModel& m) {
        VectorXd x(2 * m.z.size());
        for (int i = 0; i < m.z.size(); ++i) {
            x[2 * i] = m.z[i].real();
            x[2 * i + 1] = m.z[i].imag();
        }
        return x;
    }
    static void unpack(const VectorXd& x, GlobalCircleModel& m) {
        for (int i = 0; i < m.z.size(); ++i) m.z[i] = Complex(x[2 * i], x[2 * i + 1]);
    }
    static VectorXd rhs(const GlobalCircleModel& m) {
        const VectorXcd dz = global_circle_rhs(m);
        VectorXd x(2 * dz.size());
        for (int i = 0; i < dz.size(); ++i) {
            x[2 * i] = dz[i].real();
            x[2 * i + 1] = dz[i].imag();
        }
        return x;
    }
};

template <>
struct Flat<SubEnsembleModel> {
    static VectorXd pack(const SubEnsembleModel& m) {
        int total = 0;
        for (const auto& g : m.groups) total += static_cast<int>(g.size());
        VectorXd x(total);
        int at = 0;
        for (const auto& g : m.groups) {
            x.segment(at, g.size()) = g;
            at += static_cast<int>(g.size());
        }
        return x;
    }
    static void unpack(const VectorXd& x, SubEnsembleModel& m) {
        int at = 0;
        for (auto& g : m.groups) {
            g = x.segment(at, g.size());
            at += static_cast<int>(g.size());
        }
    }
    static VectorXd rhs(const SubEnsembleModel& m) {
        auto blocks = subensemble_rhs(m);
        int total = 0;
        for (const auto& g : blocks) total += static_cast<int>(g.size());
        VectorXd x(total);
        int at = 0;
        for (const auto& g : blocks) {
            x.segment(at, g.size()) = g;
            at += static_cast<int>(g.size());
        }
        return x;
    }
};

template <class Vec>
VectorXd pack_state_list(const std::vector<Vec>& states, int real_dim) {
    VectorXd x(static_cast<int>(states.size()) * real_dim);
    int at = 0;
    for (const auto& s : states) {
        if constexpr (std::is_same_v<Vec, VectorXd>) {
            x.segment(at, real_dim) = s;
        } else {
            for (int i = 0; i < s.size(); ++i) {
                x[at + 2 * i] = s[i].real();
                x[at + 2 * i + 1] = s[i].imag();
            }
        }
        at += real_dim;
    }
    return x;
}

template <>
struct Flat<SphereEnsemble> {
    static VectorXd pack(const SphereEnsemble& m) { return pack_state_list(m.states, m.dim()); }
    static void unpack(const VectorXd& x, SphereEnsemble& m) {
        const int d = m.dim();
        for (int j = 0; j < m.n(); ++j) m.states[j] = x.segment(j * d, d);
    }
    static VectorXd rhs(const SphereEnsemble& m) {
        auto v = sphere_rhs(m);
        return pack_state_list(v, m.dim());
    }
};

template <>
struct Flat<ComplexSphereEnsemble> {
    static VectorXd pack(const ComplexSphereEnsemble& m) {
        return pack_state_list(m.states, 2 * m.dim());
    }
    static void unpack(const VectorXd& x, ComplexSphereEnsemble& m) {
        const int d = m.dim();
        for (int j = 0; j < m.n(); ++j)
            for (int i = 0; i < d; ++i)
                m.states[j][i] = Complex(x[j * 2 * d + 2 * i], x[j * 2 * d + 2 * i + 1]);
    }
    static VectorXd rhs(const ComplexSphereEnsemble& m) {
        auto v = complex_sphere_rhs(m);
        return pack_state_list(v, 2 * m.dim());
    }
};

template <class Mat>
VectorXd pack_matrix_list(const std::vector<Mat>& states) {
    const int d = static_cast<int>(states[0].rows());
    const int per = std::is_same_v<Mat, MatrixXd> ? d * d : 2 * d * d;
    VectorXd x(static_cast<int>(states.size()) * per);
    int at = 0;
    for (const auto& s : states) {
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                if constexpr (std::is_same_v<Mat, MatrixXd>) {
                    x[at++] = s(r, c);
                } else {
                    x[at++] = s(r, c).real();
                    x[at++] = s(r, c).imag();
                }
            }
    }
    return x;
}

template <class Mat>
void unpack_matrix_list(const VectorXd& x, std::vector<Mat>& states) {
    const int d = static_cast<int>(states[0].rows());
    int at = 0;
    for (auto& s : states) {
        for (int r = 0; r < d; ++r)
            for (int c = 0; c < d; ++c) {
                if constexpr (std::is_same_v<Mat, MatrixXd>) {
                    s(r, c) = x[at++];
                } else {
                    s(r, c) = Complex(x[at], x[at + 1]);
                    at += 2;
                }
            }
    }
}

template <>
struct Flat<SoEnsemble> {
    static VectorXd pack(const SoEnsemble& m) { return pack_matrix_list(m.states); }
    static void unpack(const VectorXd& x, SoEnsemble& m) { unpack_matrix_list(x, m.states); }
    static VectorXd rhs(const SoEnsemble& m) { return pack_matrix_list(so_rhs(m)); }
};

template <>
struct Flat<UnitaryEnsemble> {
    static VectorXd pack(const UnitaryEnsemble& m) { return pack_matrix_list(m.states); }
    static void unpack(const VectorXd& x, UnitaryEnsemble& m) { unpack_matrix_list(x, m.states); }
    static VectorXd rhs(const UnitaryEnsemble& m) { return pack_matrix_list(unitary_rhs(m)); }
};

template <class Model>
VectorXd rhs_at(const Model& shape, const VectorXd& x) {
    Model tmp = shape;
    Flat<Model>::unpack(x, tmp);
    return Flat<Model>::rhs(tmp);
}

template <class Model>
VectorXd rk4_flat(const Model& m, double dt) {
    const VectorXd x0 = Flat<Model>::pack(m);
    const VectorXd k1 = Flat<Model>::rhs(m);
    const VectorXd k2 = rhs_at(m, VectorXd(x0 + 0.5 * dt * k1));
    const VectorXd k3 = rhs_at(m, VectorXd(x0 + 0.5 * dt * k2));
    const VectorXd k4 = rhs_at(m, VectorXd(x0 + dt * k3));
    return x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

// canonicalization / projection after a step
void project_state(PhaseEnsemble& m, bool) {
    for (int i = 0; i < m.phases.size(); ++i) m.phases[i] = wrap_angle(m.phases[i]);
}
void project_state(SubEnsembleModel& m, bool) {
    for (auto& g : m.groups)
        for (int i = 0; i < g.size(); ++i) g[i] = wrap_angle(g[i]);
}
void project_state(GlobalCircleModel& m, bool renorm) {
    if (!renorm) return;
    for (int i = 0; i < m.z.size(); ++i) m.z[i] /= std::abs(m.z[i]);
}
void project_state(SphereEnsemble& m, bool renorm) {
    if (!renorm) return;
    for (auto& x : m.states) x.normalize();
}
void project_state(ComplexSphereEnsemble& m, bool renorm) {
    if (!renorm) return;
    for (auto& x : m.states) x /= x.norm();
}
void project_state(SoEnsemble& m, bool renorm) {
    if (!renorm) return;
    for (auto& q : m.states)
        if (orthogonality_residual(q) > 1e-12) q = project_so(q);
}
void project_state(UnitaryEnsemble& m, bool renorm) {
    if (!renorm) return;
    for (auto& u : m.states)
        if (unitarity_residual(u) > 1e-12) u = project_unitary(u);
}

}  // namespace

// ---------------------------------------------------------------------------
// steppers
// ---------------------------------------------------------------------------

PhaseEnsemble step_phase(const PhaseEnsemble& m, const IntegratorConfig& cfg,
                         const NoiseStream& noise) {
    cfg.validate();
    if (m.noise_kappa < 0.0) throw InvalidNoiseParameter("noise_kappa must be >= 0");
    PhaseEnsemble out = m;
    if (cfg.method == Method::EulerMaruyama) {
        out.phases = m.phases + cfg.dt * phase_rhs(m);
        if (m.noise_kappa > 0.0) {
            const double scale = std::sqrt(2.0 * m.noise_kappa * cfg.dt);
            for (int j = 0; j < out.phases.size(); ++j)
                out.phases[j] += scale * noise.normal(static_cast<std::uint64_t>(j));
        }
    } else {
        // deterministic path: plain rk4 (LieEuler on the torus is the Euler step)
        if (cfg.method == Method::LieEuler)
            out.phases = m.phases + cfg.dt * phase_rhs(m);
        else
            Flat<PhaseEnsemble>::unpack(rk4_flat(m, cfg.dt), out);
    }
    project_state(out, cfg.renormalize);
    return out;
}

PhaseEnsemble step_phase_multiplicative(const PhaseEnsemble& m, double c,
                                        const IntegratorConfig& cfg, const NoiseStream& noise) {
    cfg.validate();
    if (std::abs(c) > 1.0) throw InvalidNoiseParameter("multiplicative noise needs |C| <= 1");
    if (cfg.method != Method::EulerMaruyama)
        throw InvalidParams("step_phase_multiplicative requires the euler-maruyama method");
    PhaseEnsemble out = m;
    out.phases = m.phases + cfg.dt * phase_rhs(m);
    if (m.noise_kappa > 0.0) {
        const double scale = std::sqrt(2.0 * m.noise_kappa * cfg.dt);
        const VectorXd amp = multiplicative_noise_amplitude(m.phases, c);
        for (int j = 0; j < out.phases.size(); ++j)
            out.phases[j] += amp[j] * scale * noise.normal(static_cast<std::uint64_t>(j));
    }
    project_state(out, cfg.renormalize);
    return out;
}

GlobalCircleModel step_global_circle(const GlobalCircleModel& m, const IntegratorConfig& cfg) {
    cfg.validate();
    GlobalCircleModel out = m;
    if (cfg.method == Method::LieEuler) {
        const VectorXcd dz = global_circle_rhs(m);
        for (int j = 0; j < m.z.size(); ++j)
            out.z[j] = m.z[j] * std::exp(cfg.dt * dz[j] * std::conj(m.z[j]));
    } else if (cfg.method == Method::EulerMaruyama) {
        out.z = m.z + cfg.dt * global_circle_rhs(m);
    } else {
        Flat<GlobalCircleModel>::unpack(rk4_flat(m, cfg.dt), out);
    }
    project_state(out, cfg.renormalize);
    return out;
}

SubEnsembleModel step_subensemble(const SubEnsembleModel& m, const IntegratorConfig& cfg) {
    cfg.validate();
    for (const auto& g : m.groups)
        if (g.size() == 0) throw InvalidParams("sub-ensemble blocks must be nonempty");
    SubEnsembleModel out = m;
    if (cfg.method == Method::LieEuler || cfg.method == Method::EulerMaruyama) {
        auto blocks = subensemble_rhs(m);
        for (int b = 0; b < m.blocks(); ++b) out.groups[b] = m.groups[b] + cfg.dt * blocks[b];
    } else {
        Flat<SubEnsembleModel>::unpack(rk4_flat(m, cfg.dt), out);
    }
    project_state(out, cfg.renormalize);
    return out;
}

SphereEnsemble step_sphere_real(const SphereEnsemble& m, const IntegratorConfig& cfg,
                                const NoiseStream& noise) {
    cfg.validate();
    if (m.noise_kappa < 0.0) throw InvalidNoiseParameter("noise_kappa must be >= 0");
    const int d = m.dim();
    SphereEnsemble out = m;
    if (cfg.method == Method::EulerMaruyama) {
        auto v = sphere_rhs(m);
        for (int j = 0; j < m.n(); ++j) out.states[j] = m.states[j] + cfg.dt * v[j];
        if (m.noise_kappa > 0.0) {
            const double scale = std::sqrt(2.0 * m.noise_kappa * cfg.dt);
            for (int j = 0; j < m.n(); ++j) {
                VectorXd xi(d);
                for (int c = 0; c < d; ++c)
                    xi[c] = noise.normal(static_cast<std::uint64_t>(j) * d + c);
                const VectorXd& x = m.states[j];
                out.states[j] += scale * (xi - x.dot(xi) * x);
            }
        }
    } else if (cfg.method == Method::LieEuler) {
        // geodesic step along the tangent drift
        auto v = sphere_rhs(m);
        for (int j = 0; j < m.n(); ++j) {
            const VectorXd& x = m.states[j];
            VectorXd t = v[j] - x.dot(v[j]) * x;
            const double speed = t.norm();
            if (speed * cfg.dt < 1e-300)
                out.states[j] = x;
            else
                out.states[j] =
                    std::cos(speed * cfg.dt) * x + std::sin(speed * cfg.dt) / speed * t;
        }
    } else {
        Flat<SphereEnsemble>::unpack(rk4_flat(m, cfg.dt), out);
    }
    project_state(out, cfg.renormalize);
    return out;
}

ComplexSphereEnsemble step_sphere_complex(const ComplexSphereEnsemble& m,
                                          const IntegratorConfig& cfg) {
    cfg.validate();
    ComplexSphereEnsemble out = m;
    if (cfg.method == Method::LieEuler || cfg.method == Method::EulerMaruyama) {
        auto v = complex_sphere_rhs(m);
        for (int j = 0; j < m.n(); ++j) out.states[j] = m.states[j] + cfg.dt * v[j];
    } else {
        Flat<ComplexSphereEnsemble>::unpack(rk4_flat(m, cfg.dt), out);
    }
    project_state(out, cfg.renormalize);
    return out;
}

namespace {

template <class Model, class Mat>
Model step_matrix_impl(const Model& m, const IntegratorConfig& cfg) {
    cfg.validate();
    Model out = m;
    if (cfg.method == Method::LieEuler) {
        auto omega = matrix_algebra_elements(m.states, m.freq, m.k);
        for (int j = 0; j < m.n(); ++j)
            out.states[j] = group_exp(Mat(cfg.dt * omega[j])) * m.states[j];
    } else {
        Flat<Model>::unpack(rk4_flat(m, cfg.dt), out);
    }
    project_state(out, cfg.renormalize);
    return out;
}

}  // namespace

SoEnsemble step_matrix(const SoEnsemble& m, const IntegratorConfig& cfg) {
    return step_matrix_impl<SoEnsemble, MatrixXd>(m, cfg);
}

UnitaryEnsemble step_matrix(const UnitaryEnsemble& m, const IntegratorConfig& cfg) {
    return step_matrix_impl<UnitaryEnsemble, MatrixXcd>(m, cfg);
}

// ---------------------------------------------------------------------------
// residuals
// ---------------------------------------------------------------------------

double manifold_residual(const PhaseEnsemble& m) {
    double r = 0.0;
    for (int i = 0; i < m.phases.size(); ++i)
        if (!(m.phases[i] >= 0.0 && m.phases[i] < kTwoPi)) r = std::max(r, 1.0);
    return r;
}
double manifold_residual(const SubEnsembleModel& m) {
    double r = 0.0;
    for (const auto& g : m.groups)
        for (int i = 0; i < g.size(); ++i)
            if (!(g[i] >= 0.0 && g[i] < kTwoPi)) r = std::max(r, 1.0);
    return r;
}
double manifold_residual(const GlobalCircleModel& m) {
    double r = 0.0;
    for (int i = 0; i < m.z.size(); ++i) r = std::max(r, std::abs(std::abs(m.z[i]) - 1.0));
    return r;
}
double manifold_residual(const SphereEnsemble& m) {
    double r = 0.0;
    for (const auto& x : m.states) r = std::max(r, unit_residual(x));
    return r;
}
double manifold_residual(const ComplexSphereEnsemble& m) {
    double r = 0.0;
    for (const auto& x : m.states) r = std::max(r, unit_residual(x));
    return r;
}
double manifold_residual(const SoEnsemble& m) {
    double r = 0.0;
    for (const auto& q : m.states)
        r = std::max({r, orthogonality_residual(q), std::abs(q.determinant() - 1.0)});
    return r;
}
double manifold_residual(const UnitaryEnsemble& m) {
    double r = 0.0;
    for (const auto& u : m.states) r = std::max(r, unitarity_residual(u));
    return r;
}

// ---------------------------------------------------------------------------
// simulate
// ---------------------------------------------------------------------------

namespace {

PhaseEnsemble advance(const PhaseEnsemble& m, const IntegratorConfig& cfg, const NoiseStream& s) {
    return step_phase(m, cfg, s);
}
GlobalCircleModel advance(const GlobalCircleModel& m, const IntegratorConfig& cfg,
                          const NoiseStream&) {
    return step_global_circle(m, cfg);
}
SubEnsembleModel advance(const SubEnsembleModel& m, const IntegratorConfig& cfg,
                         const NoiseStream&) {
    return step_subensemble(m, cfg);
}
SphereEnsemble advance(const SphereEnsemble& m, const IntegratorConfig& cfg,
                       const NoiseStream& s) {
    return step_sphere_real(m, cfg, s);
}
ComplexSphereEnsemble advance(const ComplexSphereEnsemble& m, const IntegratorConfig& cfg,
                              const NoiseStream&) {
    return step_sphere_complex(m, cfg);
}
SoEnsemble advance(const SoEnsemble& m, const IntegratorConfig& cfg, const NoiseStream&) {
    return step_matrix(m, cfg);
}
UnitaryEnsemble advance(const UnitaryEnsemble& m, const IntegratorConfig& cfg,
                        const NoiseStream&) {
    return step_matrix(m, cfg);
}

}  // namespace

template <class Model>
Trajectory<Model> simulate(const Model& initial, const IntegratorConfig& cfg, double t_end,
                           int record_every, std::uint64_t seed) {
    cfg.validate();
    if (t_end < 0.0) throw InvalidParams("simulate: t_end must be >= 0");
    if (record_every < 1) throw InvalidParams("simulate: record_every must be >= 1");
    Trajectory<Model> traj;
    traj.rng_seed = seed;
    traj.step_size = cfg.dt;
    traj.method = cfg.method;
    const auto steps = static_cast<std::int64_t>(std::llround(t_end / cfg.dt));
    Model state = initial;
    traj.times.push_back(0.0);
    traj.snapshots.push_back(state);
    for (std::int64_t s = 0; s < steps; ++s) {
        state = advance(state, cfg, NoiseStream{seed, static_cast<std::uint64_t>(s)});
        if ((s + 1) % record_every == 0 || s + 1 == steps) {
            traj.times.push_back((s + 1) * cfg.dt);
            traj.snapshots.push_back(state);
        }
    }
    return traj;
}

template Trajectory<PhaseEnsemble> simulate(const PhaseEnsemble&, const IntegratorConfig&, double,
                                            int, std::uint64_t);
template Trajectory<GlobalCircleModel> simulate(const GlobalCircleModel&, const IntegratorConfig&,
                                                double, int, std::uint64_t);
template Trajectory<SubEnsembleModel> simulate(const SubEnsembleModel&, const IntegratorConfig&,
                                               double, int, std::uint64_t);
template Trajectory<SphereEnsemble> simulate(const SphereEnsemble&, const IntegratorConfig&,
                                             double, int, std::uint64_t);
template Trajectory<ComplexSphereEnsemble> simulate(const ComplexSphereEnsemble&,
                                                    const IntegratorConfig&, double, int,
                                                    std::uint64_t);
template Trajectory<SoEnsemble> simulate(const SoEnsemble&, const IntegratorConfig&, double, int,
                                         std::uint64_t);
template Trajectory<UnitaryEnsemble> simulate(const UnitaryEnsemble&, const IntegratorConfig&,
                                              double, int, std::uint64_t);

Trajectory<PhaseEnsemble> simulate_multiplicative(const PhaseEnsemble& initial, double c,
                                                  const IntegratorConfig& cfg, double t_end,
                                                  int record_every, std::uint64_t seed) {
    cfg.validate();
    if (t_end < 0.0) throw InvalidParams("simulate: t_end must be >= 0");
    Trajectory<PhaseEnsemble> traj;
    traj.rng_seed = seed;
    traj.step_size = cfg.dt;
    traj.method = cfg.method;
    const auto steps = static_cast<std::int64_t>(std::llround(t_end / cfg.dt));
    PhaseEnsemble state = initial;
    traj.times.push_back(0.0);
    traj.snapshots.push_back(state);
    for (std::int64_t s = 0; s < steps; ++s) {
        state = step_phase_multiplicative(state, c, cfg,
                                          NoiseStream{seed, static_cast<std::uint64_t>(s)});
        if ((s + 1) % record_every == 0 || s + 1 == steps) {
            traj.times.push_back((s + 1) * cfg.dt);
            traj.snapshots.push_back(state);
        }
    }
    return traj;
}

// ---------------------------------------------------------------------------
// Moebius flow extraction
// ---------------------------------------------------------------------------

std::array<int, 3> pick_anchor_triple(const VectorXcd& z) {
    const int n = static_cast<int>(z.size());
    if (n < 3) throw DegenerateInitialData("need at least 3 oscillators");
    auto arc = [&](int i, int j) {
        return std::abs(circular_diff(std::arg(z[i]), std::arg(z[j])));
    };
    int a = 0, b = 1;
    double best = -1.0;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j)
            if (arc(i, j) > best) {
                best = arc(i, j);
                a = i;
                b = j;
            }
    int c = -1;
    best = -1.0;
    for (int k = 0; k < n; ++k) {
        if (k == a || k == b) continue;
        const double sep = std::min(arc(k, a), arc(k, b));
        if (sep > best) {
            best = sep;
            c = k;
        }
    }
    return {a, b, c};
}

std::vector<MoebiusMap> moebius_family_extract(const Trajectory<GlobalCircleModel>& traj) {
    if (traj.snapshots.empty()) throw DegenerateInitialData("empty trajectory");
    const VectorXcd& z0 = traj.snapshots.front().z;
    const auto anchors = pick_anchor_triple(z0);
    std::array<Complex, 3> src;
    for (int i = 0; i < 3; ++i) src[i] = z0[anchors[i]] / std::abs(z0[anchors[i]]);
    std::vector<MoebiusMap> out;
    out.reserve(traj.snapshots.size());
    for (const auto& snap : traj.snapshots) {
        std::array<Complex, 3> dst;
        for (int i = 0; i < 3; ++i) dst[i] = snap.z[anchors[i]] / std::abs(snap.z[anchors[i]]);
        out.push_back(MoebiusMap::from_three_points(src, dst));
    }
    return out;
}

}  // namespace kuramoto
