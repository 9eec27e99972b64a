// Adaptive Dormand-Prince 5(4) with the standard quartic dense interpolant.

#ifndef BL_ODE_HPP
#define BL_ODE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "bl/errors.hpp"

namespace bl {

template <int N>
struct OdeStep {
    double t0 = 0.0;
    double h = 0.0;
    std::array<double, N> y0{};
    std::array<double, N> y1{};
    std::array<double, N> rc2{}, rc3{}, rc4{}, rc5{}; // dense coefficients

    double t1() const { return t0 + h; }

    void eval(double t, double* y) const {
        const double s = (t - t0) / h;
        const double s1 = 1.0 - s;
        for (int i = 0; i < N; ++i)
            y[i] = y0[i] + s * (rc2[i] + s1 * (rc3[i] + s * (rc4[i] + s1 * rc5[i])));
    }
};

struct OdeOptions {
    double rel_tol = 1e-12;
    double abs_tol = 1e-12;
    double h_init = 1e-3;
    double h_min = 1e-14;
    long max_steps = 40'000'000;
};

// RHS: void(double t, const double* y, double* dy)
template <int N, class RHS>
class DormandPrince {
public:
    DormandPrince(RHS rhs, const double* y0, OdeOptions opt = {}) : rhs_(std::move(rhs)), opt_(opt) {
        std::copy(y0, y0 + N, y_.begin());
        rhs_(0.0, y_.data(), k1_.data());
        h_ = opt_.h_init;
    }

    double t() const { return t_; }
    const std::array<double, N>& y() const { return y_; }
    double* y_mut() { return y_.data(); }

    // refresh cached derivative after an external state modification (renormalization)
    void resync() { rhs_(t_, y_.data(), k1_.data()); }

    // advance one accepted step; writes the dense step
    void step(OdeStep<N>& out) {
        static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
        static constexpr double a21 = 1.0 / 5;
        static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
        static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
        static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                                a53 = 64448.0 / 6561, a54 = -212.0 / 729;
        static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                                a64 = 49.0 / 176, a65 = -5103.0 / 18656;
        static constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                                b5 = -2187.0 / 6784, b6 = 11.0 / 84;
        static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                                e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
        static constexpr double d1 = -12715105075.0 / 11282082432.0,
                                d3 = 87487479700.0 / 32700410799.0,
                                d4 = -10690763975.0 / 1880347072.0,
                                d5 = 701980252875.0 / 199316789632.0,
                                d6 = -1453857185.0 / 822651844.0,
                                d7 = 69997945.0 / 29380423.0;

        std::array<double, N> k2, k3, k4, k5, k6, k7, yt, y1;
        for (long attempt = 0;; ++attempt) {
            if (attempt > 200 || h_ < opt_.h_min)
                throw StepFailure("step size underflow");
            const double h = h_;

            for (int i = 0; i < N; ++i) yt[i] = y_[i] + h * a21 * k1_[i];
            rhs_(t_ + c2 * h, yt.data(), k2.data());
            for (int i = 0; i < N; ++i) yt[i] = y_[i] + h * (a31 * k1_[i] + a32 * k2[i]);
            rhs_(t_ + c3 * h, yt.data(), k3.data());
            for (int i = 0; i < N; ++i)
                yt[i] = y_[i] + h * (a41 * k1_[i] + a42 * k2[i] + a43 * k3[i]);
            rhs_(t_ + c4 * h, yt.data(), k4.data());
            for (int i = 0; i < N; ++i)
                yt[i] = y_[i] + h * (a51 * k1_[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
            rhs_(t_ + c5 * h, yt.data(), k5.data());
            for (int i = 0; i < N; ++i)
                yt[i] = y_[i] +
                        h * (a61 * k1_[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
            rhs_(t_ + h, yt.data(), k6.data());
            for (int i = 0; i < N; ++i)
                y1[i] = y_[i] +
                        h * (b1 * k1_[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
            rhs_(t_ + h, y1.data(), k7.data());

            double err = 0.0;
            for (int i = 0; i < N; ++i) {
                const double sc =
                    opt_.abs_tol + opt_.rel_tol * std::max(std::abs(y_[i]), std::abs(y1[i]));
                const double e = h * (e1 * k1_[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                      e6 * k6[i] + e7 * k7[i]);
                err += (e / sc) * (e / sc);
            }
            err = std::sqrt(err / N);

            if (err <= 1.0) {
                out.t0 = t_;
                out.h = h;
                out.y0 = y_;
                out.y1 = y1;
                for (int i = 0; i < N; ++i) {
                    const double dy = y1[i] - y_[i];
                    out.rc2[i] = dy;
                    out.rc3[i] = h * k1_[i] - dy;
                    out.rc4[i] = dy - h * k7[i] - out.rc3[i];
                    out.rc5[i] = h * (d1 * k1_[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                                      d6 * k6[i] + d7 * k7[i]);
                }
                t_ += h;
                y_ = y1;
                k1_ = k7; // FSAL
                const double fac = std::clamp(0.9 * std::pow(err > 1e-30 ? err : 1e-30, -0.2), 0.2, 5.0);
                h_ = h * fac;
                return;
            }
            h_ = h * std::clamp(0.9 * std::pow(err, -0.2), 0.2, 1.0);
        }
    }

    void clamp_h(double hmax) { h_ = std::min(h_, hmax); }

private:
    RHS rhs_;
    OdeOptions opt_;
    double t_ = 0.0;
    double h_ = 1e-3;
    std::array<double, N> y_{};
    std::array<double, N> k1_{};
};

} // namespace bl

#endif
