#include "mipt/quadrature.hpp"

#include "mipt/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>
#include <vector>

namespace mipt {

namespace {

// Kronrod abscissae (descending, last = 0) and weights; Gauss weights for
// the embedded 7-point rule sit on the odd Kronrod nodes.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
    double a, b, value, error;
    bool operator<(const Segment& o) const { return error < o.error; }
};

Segment gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = h * kXgk[j];
        const double fsum = f(c - dx) + f(c + dx);
        kron += kWgk[j] * fsum;
        if (j % 2 == 1) gauss += kWg[j / 2] * fsum;
    }
    kron *= h;
    gauss *= h;
    // The raw Gauss/Kronrod difference is a (pessimistic) error bound.
    double err = std::abs(kron - gauss);
    err = std::max(err, 50.0 * std::numeric_limits<double>::epsilon() * std::abs(kron));
    return {a, b, kron, err};
}

} // namespace

QuadratureResult integrate(const std::function<double(double)>& f, double a, double b,
                           double abs_tol, double rel_tol, int max_intervals) {
    QuadratureResult out;
    if (a == b) return out;
    std::priority_queue<Segment> heap;
    Segment first = gk15(f, a, b);
    out.evaluations = 15;
    heap.push(first);
    double total = first.value;
    double total_err = first.error;
    int intervals = 1;
    while (total_err > std::max(abs_tol, rel_tol * std::abs(total))) {
        if (intervals >= max_intervals) {
            throw NumericalFailure("adaptive quadrature did not reach tolerance", intervals);
        }
        const Segment worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (mid <= worst.a || mid >= worst.b) {
            throw NumericalFailure("adaptive quadrature: interval underflow", intervals);
        }
        heap.pop();
        const Segment left = gk15(f, worst.a, mid);
        const Segment right = gk15(f, mid, worst.b);
        out.evaluations += 30;
        ++intervals;
        total += left.value + right.value - worst.value;
        total_err += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        // Resum periodically to avoid drift from the incremental updates.
        if (intervals % 64 == 0) {
            auto copy = heap;
            total = total_err = 0.0;
            while (!copy.empty()) {
                total += copy.top().value;
                total_err += copy.top().error;
                copy.pop();
            }
        }
    }
    out.value = 0.0;
    out.error = 0.0;
    while (!heap.empty()) {
        out.value += heap.top().value;
        out.error += heap.top().error;
        heap.pop();
    }
    return out;
}

QuadratureResult integrate_endpoint_singular(const std::function<double(double)>& f, double a, double b,
                                             double abs_tol, double rel_tol, int max_intervals) {
    QuadratureResult out;
    if (a == b) return out;
    const double h = 0.5 * (b - a);
    // x = a + h u^2, dx = 2 h u du on u in [0, 1]
    const auto left = [&](double u) { return 2.0 * h * u * f(a + h * u * u); };
    const auto right = [&](double u) { return 2.0 * h * u * f(b - h * u * u); };
    const QuadratureResult l = integrate(left, 0.0, 1.0, 0.5 * abs_tol, rel_tol, max_intervals);
    const QuadratureResult r = integrate(right, 0.0, 1.0, 0.5 * abs_tol, rel_tol, max_intervals);
    out.value = l.value + r.value;
    out.error = l.error + r.error;
    out.evaluations = l.evaluations + r.evaluations;
    return out;
}

} // namespace mipt
