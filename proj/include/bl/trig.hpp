// Real trigonometric polynomials with analytic derivatives.

#ifndef BL_TRIG_HPP
#define BL_TRIG_HPP

#include <cmath>
#include <cstddef>
#include <vector>

namespace bl {

// f(x) = c0 + sum_k ( cos_k * cos(k x) + sin_k * sin(k x) ),  k = 1..K
struct TrigSeries {
    double c0 = 0.0;
    std::vector<double> cos_k; // index 0 <-> k = 1
    std::vector<double> sin_k;

    static TrigSeries constant(double c) { return TrigSeries{c, {}, {}}; }

    static TrigSeries sines(std::vector<double> coeffs) {
        TrigSeries s;
        s.sin_k = std::move(coeffs);
        s.cos_k.assign(s.sin_k.size(), 0.0);
        return s;
    }

    static TrigSeries cosines(double c0, std::vector<double> coeffs) {
        TrigSeries s;
        s.c0 = c0;
        s.cos_k = std::move(coeffs);
        s.sin_k.assign(s.cos_k.size(), 0.0);
        return s;
    }

    std::size_t order() const { return cos_k.size(); }

    double eval(double x) const {
        double f = c0;
        for (std::size_t i = 0; i < order(); ++i) {
            const double k = double(i + 1);
            f += cos_k[i] * std::cos(k * x) + sin_k[i] * std::sin(k * x);
        }
        return f;
    }

    double deriv(double x) const {
        double f = 0.0;
        for (std::size_t i = 0; i < order(); ++i) {
            const double k = double(i + 1);
            f += k * (-cos_k[i] * std::sin(k * x) + sin_k[i] * std::cos(k * x));
        }
        return f;
    }

    double deriv2(double x) const {
        double f = 0.0;
        for (std::size_t i = 0; i < order(); ++i) {
            const double k = double(i + 1);
            f += -k * k * (cos_k[i] * std::cos(k * x) + sin_k[i] * std::sin(k * x));
        }
        return f;
    }
};

// One Fourier mode on the 2-torus (or on a surface of revolution chart):
// amp_cos * cos(a*ju*u + b*jv*v) + amp_sin * sin(...), with angular factors
// ju, jv fixed by the chart periods at construction time.
struct FourierMode2D {
    int ju = 0;
    int jv = 0;
    double amp_cos = 0.0;
    double amp_sin = 0.0;
};

} // namespace bl

#endif
