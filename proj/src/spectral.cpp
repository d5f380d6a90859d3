// FFT-backed calculus on periodic grids. All transforms are complex-to-complex
// through fftw_malloc'd buffers so FFTW always sees aligned data and picks the
// same codelets run to run (byte-deterministic output).

#include "gfr/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <mutex>
#include <new>
#include <stdexcept>

#include <fftw3.h>

namespace gfr {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::mutex& planner_mutex() {
    static std::mutex m;
    return m;
}

// RAII complex buffer with FFTW-preferred alignment.
class ComplexBuffer {
  public:
    explicit ComplexBuffer(std::size_t n) : n_(n), p_(fftw_alloc_complex(n)) {
        if (p_ == nullptr) throw std::bad_alloc();
    }
    ~ComplexBuffer() { fftw_free(p_); }
    ComplexBuffer(const ComplexBuffer&) = delete;
    ComplexBuffer& operator=(const ComplexBuffer&) = delete;

    std::complex<double>* data() { return reinterpret_cast<std::complex<double>*>(p_); }
    fftw_complex* raw() { return p_; }
    std::size_t size() const { return n_; }

  private:
    std::size_t n_;
    fftw_complex* p_;
};

// In-place DFT. The FFTW planner is not thread-safe, so plan creation and
// destruction are serialized; execution is reentrant.
void dft_inplace(const TorusGrid& g, ComplexBuffer& buf, int sign) {
    fftw_plan plan = nullptr;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = g.dim == 1
                   ? fftw_plan_dft_1d(g.n, buf.raw(), buf.raw(), sign, FFTW_ESTIMATE)
                   : fftw_plan_dft_2d(g.n, g.n, buf.raw(), buf.raw(), sign, FFTW_ESTIMATE);
    }
    if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
    fftw_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftw_destroy_plan(plan);
    }
}

void load(const std::vector<double>& values, ComplexBuffer& buf) {
    for (std::size_t m = 0; m < values.size(); ++m) {
        buf.data()[m] = std::complex<double>(values[m], 0.0);
    }
}

// Inverse transform leaves an imaginary residue of pure roundoff whenever the
// spectrum kept its Hermitian symmetry; anything larger means a broken
// multiplier table.
void store_real(const TorusGrid& g, ComplexBuffer& buf, std::vector<double>& out,
                const char* what) {
    const double norm = 1.0 / static_cast<double>(g.size());
    double max_abs = 0.0;
    double max_imag = 0.0;
    for (std::size_t m = 0; m < out.size(); ++m) {
        const std::complex<double> z = buf.data()[m] * norm;
        out[m] = z.real();
        max_abs = std::max(max_abs, std::abs(z.real()));
        max_imag = std::max(max_imag, std::abs(z.imag()));
    }
    if (max_imag > 1e-12 * std::max(1.0, max_abs)) {
        throw FieldError(std::string(what) + ": imaginary residue after inverse transform");
    }
}

// Angular frequency along `axis` for DFT bin k, with the Nyquist derivative
// zeroed (an odd multiplier must vanish there to stay Hermitian-symmetric).
double derivative_freq(int k, int n, double length) {
    if (k == n / 2) return 0.0;
    return kTwoPi / length * spectral::signed_freq(k, n);
}

// Multiply the spectrum in `buf` by i*kappa_axis.
void multiply_by_ik(const TorusGrid& g, ComplexBuffer& buf, int axis) {
    const int n = g.n;
    if (g.dim == 1) {
        for (int k = 0; k < n; ++k) {
            const double kap = derivative_freq(k, n, g.length);
            buf.data()[k] *= std::complex<double>(0.0, kap);
        }
        return;
    }
    for (int ki = 0; ki < n; ++ki) {
        const double kap_i = derivative_freq(ki, n, g.length);
        for (int kj = 0; kj < n; ++kj) {
            const double kap = axis == 0 ? kap_i : derivative_freq(kj, n, g.length);
            buf.data()[g.index(ki, kj)] *= std::complex<double>(0.0, kap);
        }
    }
}

void derivative_into(const TorusGrid& g, const std::vector<double>& values, int axis,
                     std::vector<double>& out) {
    ComplexBuffer buf(g.size());
    load(values, buf);
    dft_inplace(g, buf, FFTW_FORWARD);
    multiply_by_ik(g, buf, axis);
    dft_inplace(g, buf, FFTW_BACKWARD);
    store_real(g, buf, out, "spectral derivative");
}

// Forward transform once, then emit one derivative per axis from the cached
// spectrum.
void all_derivatives_into(const TorusGrid& g, const std::vector<double>& values,
                          std::vector<std::vector<double>*> out_per_axis) {
    ComplexBuffer spectrum(g.size());
    load(values, spectrum);
    dft_inplace(g, spectrum, FFTW_FORWARD);
    for (int axis = 0; axis < g.dim; ++axis) {
        ComplexBuffer work(g.size());
        for (std::size_t m = 0; m < g.size(); ++m) work.data()[m] = spectrum.data()[m];
        multiply_by_ik(g, work, axis);
        dft_inplace(g, work, FFTW_BACKWARD);
        store_real(g, work, *out_per_axis[static_cast<std::size_t>(axis)],
                   "spectral derivative");
    }
}

} // namespace

ScalarField spectral_derivative(const ScalarField& f, int axis) {
    require_finite(f, "spectral_derivative");
    if (axis < 0 || axis >= f.grid.dim) throw FieldError("spectral_derivative: bad axis");
    ScalarField out(f.grid);
    derivative_into(f.grid, f.values, axis, out.values);
    return out;
}

VectorField spectral_gradient(const ScalarField& f) {
    require_finite(f, "spectral_gradient");
    VectorField out(f.grid);
    std::vector<std::vector<double>*> dst;
    for (int a = 0; a < f.grid.dim; ++a) dst.push_back(&out.comp[static_cast<std::size_t>(a)]);
    all_derivatives_into(f.grid, f.values, dst);
    return out;
}

std::vector<MetricField> spectral_tensor_derivative(const MetricField& t) {
    require_finite(t, "spectral_tensor_derivative");
    const TorusGrid& g = t.grid;
    std::vector<MetricField> out(static_cast<std::size_t>(g.dim), MetricField(g));
    for (std::size_t c = 0; c < t.comp.size(); ++c) {
        std::vector<std::vector<double>*> dst;
        for (int a = 0; a < g.dim; ++a) dst.push_back(&out[static_cast<std::size_t>(a)].comp[c]);
        all_derivatives_into(g, t.comp[c], dst);
    }
    return out;
}

JacobianField spectral_jacobian(const VectorField& v) {
    require_finite(v, "spectral_jacobian");
    const TorusGrid& g = v.grid;
    JacobianField out(g);
    for (int a = 0; a < g.dim; ++a) {
        std::vector<std::vector<double>*> dst;
        for (int b = 0; b < g.dim; ++b) dst.push_back(&out.entry(a, b));
        all_derivatives_into(g, v.comp[static_cast<std::size_t>(a)], dst);
    }
    return out;
}

namespace {

// The inertia symbol reaches ~1e7 at the spectral corner for desk-scale
// parameters, which would amplify double-precision transform roundoff past
// the 1e-12 contracts on apply/invert. The multiplier path therefore runs in
// long double (~1e-19 eps), keeping the junk floor below tolerance even after
// amplification. Derivative multipliers are small; they stay in double.
class ComplexBufferL {
  public:
    explicit ComplexBufferL(std::size_t n) : p_(fftwl_alloc_complex(n)) {
        if (p_ == nullptr) throw std::bad_alloc();
    }
    ~ComplexBufferL() { fftwl_free(p_); }
    ComplexBufferL(const ComplexBufferL&) = delete;
    ComplexBufferL& operator=(const ComplexBufferL&) = delete;

    fftwl_complex* raw() { return p_; }

  private:
    fftwl_complex* p_;
};

void dft_inplace_l(const TorusGrid& g, ComplexBufferL& buf, int sign) {
    fftwl_plan plan = nullptr;
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        plan = g.dim == 1
                   ? fftwl_plan_dft_1d(g.n, buf.raw(), buf.raw(), sign, FFTW_ESTIMATE)
                   : fftwl_plan_dft_2d(g.n, g.n, buf.raw(), buf.raw(), sign, FFTW_ESTIMATE);
    }
    if (plan == nullptr) throw std::runtime_error("FFTW planning failed");
    fftwl_execute(plan);
    {
        std::lock_guard<std::mutex> lock(planner_mutex());
        fftwl_destroy_plan(plan);
    }
}

} // namespace

namespace spectral {

std::vector<double> kappa_squared(const TorusGrid& g) {
    const int n = g.n;
    const double base = kTwoPi / g.length;
    std::vector<double> out(g.size(), 0.0);
    if (g.dim == 1) {
        for (int k = 0; k < n; ++k) {
            const double kap = base * signed_freq(k, n);
            out[static_cast<std::size_t>(k)] = kap * kap;
        }
        return out;
    }
    for (int ki = 0; ki < n; ++ki) {
        const double ki_ang = base * signed_freq(ki, n);
        for (int kj = 0; kj < n; ++kj) {
            const double kj_ang = base * signed_freq(kj, n);
            out[g.index(ki, kj)] = ki_ang * ki_ang + kj_ang * kj_ang;
        }
    }
    return out;
}

namespace {

void apply_multiplier_into(const TorusGrid& g, const std::vector<double>& values,
                           const std::vector<double>& mult, std::vector<double>& out) {
    if (mult.size() != g.size()) throw FieldError("mode multiplier: wrong table size");
    const std::size_t sz = g.size();
    ComplexBufferL buf(sz);
    for (std::size_t m = 0; m < sz; ++m) {
        buf.raw()[m][0] = static_cast<long double>(values[m]);
        buf.raw()[m][1] = 0.0L;
    }
    dft_inplace_l(g, buf, FFTW_FORWARD);
    for (std::size_t m = 0; m < sz; ++m) {
        const long double s = static_cast<long double>(mult[m]);
        buf.raw()[m][0] *= s;
        buf.raw()[m][1] *= s;
    }
    dft_inplace_l(g, buf, FFTW_BACKWARD);

    const long double norm = 1.0L / static_cast<long double>(sz);
    long double max_abs = 0.0L;
    long double max_imag = 0.0L;
    for (std::size_t m = 0; m < sz; ++m) {
        const long double re = buf.raw()[m][0] * norm;
        const long double im = buf.raw()[m][1] * norm;
        out[m] = static_cast<double>(re);
        max_abs = std::max(max_abs, std::abs(re));
        max_imag = std::max(max_imag, std::abs(im));
    }
    // A symmetric real multiplier leaves only roundoff in the imaginary part,
    // at most the transform eps amplified by the multiplier's dynamic range.
    // A broken (asymmetric) table shows up at the field's own magnitude.
    long double mult_sup = 0.0L;
    for (double s : mult) mult_sup = std::max(mult_sup, std::abs(static_cast<long double>(s)));
    const long double allowance =
        (1e-12L + 1e-16L * mult_sup) * std::max(1.0L, max_abs);
    if (max_imag > allowance) {
        throw FieldError("mode multiplier: imaginary residue after inverse transform");
    }
}

} // namespace

ScalarField apply_mode_multiplier(const ScalarField& f, const std::vector<double>& mult) {
    require_finite(f, "apply_mode_multiplier");
    ScalarField out(f.grid);
    apply_multiplier_into(f.grid, f.values, mult, out.values);
    return out;
}

VectorField apply_mode_multiplier(const VectorField& v, const std::vector<double>& mult) {
    require_finite(v, "apply_mode_multiplier");
    VectorField out(v.grid);
    for (std::size_t c = 0; c < v.comp.size(); ++c) {
        apply_multiplier_into(v.grid, v.comp[c], mult, out.comp[c]);
    }
    return out;
}

} // namespace spectral

} // namespace gfr
