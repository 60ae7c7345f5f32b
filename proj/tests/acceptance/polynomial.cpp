#include "polynomial.hpp"

#include <algorithm>
#include <cmath>

namespace acceptance {

namespace {

double ipow(double x, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= x;
    return r;
}

// d/dx of x^a (1-x)^b.
double basis_derivative(double x, int a, int b) {
    double r = 0.0;
    if (a > 0) r += a * ipow(x, a - 1) * ipow(1.0 - x, b);
    if (b > 0) r -= b * ipow(x, a) * ipow(1.0 - x, b - 1);
    return r;
}

// Maximum of f over [0, 1] given its derivative: compare both endpoints
// and every sign-change root of df found by a dense scan plus bisection.
double axis_max(const std::function<double(double)>& f,
                const std::function<double(double)>& df) {
    double best_x = 0.0;
    double best_f = f(0.0);
    if (f(1.0) > best_f) {
        best_x = 1.0;
        best_f = f(1.0);
    }
    const int kScan = 2000;
    double prev = df(0.0);
    for (int i = 1; i <= kScan; ++i) {
        const double x = static_cast<double>(i) / kScan;
        const double cur = df(x);
        if ((prev > 0.0 && cur < 0.0) || (prev < 0.0 && cur > 0.0) || cur == 0.0) {
            double lo = static_cast<double>(i - 1) / kScan, hi = x;
            for (int it = 0; it < 100 && hi - lo > 1e-15; ++it) {
                const double mid = (lo + hi) / 2.0;
                const double v = df(mid);
                if (v == 0.0) {
                    lo = hi = mid;
                } else if ((v > 0.0) == (prev > 0.0)) {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            const double root = (lo + hi) / 2.0;
            const double fr = f(root);
            if (fr > best_f) {
                best_f = fr;
                best_x = root;
            }
        }
        prev = cur;
    }
    return best_x;
}

}  // namespace

double eval_terms(const std::vector<Term>& terms, double qm, double qc) {
    double sum = 0.0;
    for (const Term& t : terms)
        sum += t.coef * ipow(qm, t.a) * ipow(1.0 - qm, t.b) * ipow(qc, t.c) *
               ipow(1.0 - qc, t.d);
    return sum;
}

MaxPoint maximize_terms(const std::vector<Term>& terms) {
    auto f = [&](double m, double c) { return eval_terms(terms, m, c); };
    auto dm = [&](double m, double c) {
        double sum = 0.0;
        for (const Term& t : terms)
            sum += t.coef * basis_derivative(m, t.a, t.b) * ipow(c, t.c) *
                   ipow(1.0 - c, t.d);
        return sum;
    };
    auto dc = [&](double m, double c) {
        double sum = 0.0;
        for (const Term& t : terms)
            sum += t.coef * ipow(m, t.a) * ipow(1.0 - m, t.b) *
                   basis_derivative(c, t.c, t.d);
        return sum;
    };

    // Coarse localization so coordinate ascent starts near the global max.
    MaxPoint p;
    const int kGrid = 200;
    p.value = f(0.0, 0.0);
    for (int i = 0; i <= kGrid; ++i) {
        for (int j = 0; j <= kGrid; ++j) {
            const double m = static_cast<double>(i) / kGrid;
            const double c = static_cast<double>(j) / kGrid;
            const double v = f(m, c);
            if (v > p.value) p = {m, c, v};
        }
    }
    for (int round = 0; round < 20; ++round) {
        const double prev_m = p.qm, prev_c = p.qc;
        p.qm = axis_max([&](double m) { return f(m, p.qc); },
                        [&](double m) { return dm(m, p.qc); });
        p.qc = axis_max([&](double c) { return f(p.qm, c); },
                        [&](double c) { return dc(p.qm, c); });
        if (std::fabs(p.qm - prev_m) < 1e-14 && std::fabs(p.qc - prev_c) < 1e-14) break;
    }
    p.value = f(p.qm, p.qc);
    return p;
}

}  // namespace acceptance
