#include "conemult/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <queue>
#include <stdexcept>

namespace conemult {

namespace {

// Kronrod 15-point nodes (positive half) and weights; Gauss 7-point weights on the odd nodes.
constexpr double xk[8] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                          0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                          0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                          0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double wk[8] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                          0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                          0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                          0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double wg[4] = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                          0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Piece {
    double a, b, value, error;
    bool operator<(const Piece& o) const { return error < o.error; }
};

Piece gk15(const std::function<double(double)>& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    const double fc = f(c);
    double kron = fc * wk[7], gauss = fc * wg[3];
    for (int i = 0; i < 7; ++i) {
        const double dx = h * xk[i];
        const double s = f(c - dx) + f(c + dx);
        kron += wk[i] * s;
        if (i % 2 == 1) gauss += wg[i / 2] * s;
    }
    return {a, b, kron * h, std::abs((kron - gauss) * h)};
}

} // namespace

QuadResult integrate_adaptive(const std::function<double(double)>& f, double a, double b, double abs_tol,
                              double rel_tol, int max_intervals) {
    std::priority_queue<Piece> heap;
    Piece first = gk15(f, a, b);
    heap.push(first);
    double value = first.value, error = first.error;
    long evals = 15;
    int intervals = 1;
    while (error > std::max(abs_tol, rel_tol * std::abs(value)) && intervals < max_intervals) {
        Piece p = heap.top();
        heap.pop();
        const double m = 0.5 * (p.a + p.b);
        if (!(m > p.a && m < p.b)) { // interval below double resolution
            heap.push(p);
            break;
        }
        Piece l = gk15(f, p.a, m), r = gk15(f, m, p.b);
        evals += 30;
        ++intervals;
        value += l.value + r.value - p.value;
        error += l.error + r.error - p.error;
        heap.push(l);
        heap.push(r);
    }
    // re-sum to avoid drift from the incremental updates
    value = 0;
    error = 0;
    while (!heap.empty()) {
        value += heap.top().value;
        error += heap.top().error;
        heap.pop();
    }
    return {value, error, evals, error <= std::max(abs_tol, rel_tol * std::abs(value))};
}

static GaussRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double mu0) {
    const int n = static_cast<int>(diag.size());
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    J.diagonal() = diag;
    for (int i = 0; i + 1 < n; ++i) J(i, i + 1) = J(i + 1, i) = off[i];
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    GaussRule rule;
    for (int i = 0; i < n; ++i) {
        rule.nodes.push_back(es.eigenvalues()[i]);
        const double v0 = es.eigenvectors()(0, i);
        rule.weights.push_back(mu0 * v0 * v0);
    }
    return rule;
}

GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("rule size must be positive");
    Eigen::VectorXd d = Eigen::VectorXd::Zero(n), e(std::max(n - 1, 0));
    for (int k = 1; k < n; ++k) e[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
    return golub_welsch(d, e, 2.0);
}

GaussRule gauss_laguerre(int n, double alpha) {
    if (n < 1) throw std::invalid_argument("rule size must be positive");
    if (alpha <= -1) throw std::invalid_argument("alpha must exceed -1");
    Eigen::VectorXd d(n), e(std::max(n - 1, 0));
    for (int k = 0; k < n; ++k) d[k] = 2.0 * k + alpha + 1.0;
    for (int k = 1; k < n; ++k) e[k - 1] = std::sqrt(k * (k + alpha));
    return golub_welsch(d, e, std::tgamma(alpha + 1.0));
}

} // namespace conemult
