#include "conemult/multiplier.hpp"

#include "conemult/quadrature.hpp"
#include "conemult/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace conemult {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Axis of F parallel to the normal and the sign of <axis, normal>.
std::pair<int, int> normal_axis(const Box3& F, const Eigen::Vector3d& normal) {
    const double nn = normal.norm();
    if (!(nn > 0)) throw std::invalid_argument("half-space normal must be nonzero");
    for (int a = 0; a < 3; ++a) {
        const double c = F.axes.col(a).dot(normal) / nn;
        if (std::abs(std::abs(c) - 1) < 1e-9) return {a, c > 0 ? 1 : -1};
    }
    throw std::invalid_argument("half-space normal is not parallel to a box axis");
}

double face_factor(double q, double h) {
    const double d = std::abs(q) - h;
    const double tol = 1e-10 * (1 + h);
    if (d > tol) return 0;
    return d >= -tol ? 0.5 : 1.0;
}

double interval_overlap(double c1, double h1, double c2, double h2) {
    return std::max(0.0, std::min(c1 + h1, c2 + h2) - std::max(c1 - h1, c2 - h2));
}

Eigen::MatrixXd to_dynamic(const Matrix3d& m) { return Eigen::MatrixXd(m); }

} // namespace

cplx halfline_projection_1d(double a, double b, double t, int sign) {
    if (!(a < b)) throw std::invalid_argument("halfline_projection_1d needs a < b");
    const double tol = 1e-12 * (1 + std::max(std::abs(a), std::abs(b)));
    if (std::abs(t - a) <= tol || std::abs(t - b) <= tol)
        throw SingularityError("halfline_projection_1d is singular at the interval endpoints");
    const double ind = (t > a && t < b) ? 1.0 : 0.0;
    const double hilbert = std::log(std::abs((t - a) / (t - b))) / kPi;
    return 0.5 * cplx(ind, (sign >= 0 ? 1.0 : -1.0) * hilbert);
}

double halfline_decay_constant(double a, double b, double delta, double t_max) {
    if (!(t_max > b + delta)) throw std::invalid_argument("empty scan range");
    // geometric scans resolve both the endpoint layer and the far tail, on each side of [a, b]
    const int steps = 20000;
    double c = std::numeric_limits<double>::infinity();
    for (int i = 0; i <= steps; ++i) {
        const double f = static_cast<double>(i) / steps;
        const double right = b + delta * std::pow((t_max - b) / delta, f);
        const double left = a - delta * std::pow((t_max + a) / delta, f);
        for (double s : {right, left})
            if (std::abs(s) <= t_max && std::abs(s) >= b + delta)
                c = std::min(c, std::abs(s) * std::abs(halfline_projection_1d(a, b, s)));
    }
    return c;
}

cplx box_halfspace_image(const Box3& F, const Eigen::Vector3d& normal, const Eigen::Vector3d& x) {
    const auto [a, s] = normal_axis(F, normal);
    const Eigen::Vector3d q = F.local(x);
    double cross = 1;
    for (int b = 0; b < 3; ++b)
        if (b != a) cross *= face_factor(q[b], F.half[b]);
    if (cross == 0) return 0;
    // 1_{<xi, normal> < 0} = 1_{-s * eta_a > 0} in box coordinates
    return cross * halfline_projection_1d(-F.half[a], F.half[a], q[a], -s);
}

Lattice box_lattice(const Box3& F, std::array<int, 4> n, std::array<double, 3> samples_per_half) {
    std::array<double, 4> L{1, 1, 1, 1};
    for (int a = 0; a < 3; ++a) L[a] = 0.5 * n[a] * F.half[a] / samples_per_half[a];
    return Lattice::aligned(to_dynamic(F.axes), Eigen::VectorXd(F.center), n, L);
}

BoxImageCheck box_image_fft_check(const BoxFamily& boxes, const BoxImageOptions& opt) {
    BoxImageCheck out;
    double num = 0, den = 0;
    for (const auto& bt : boxes.boxes) {
        const Box3& F = bt.F;
        const auto [axis, s] = normal_axis(F, bt.nt);
        (void)s;
        if (axis != 0) throw std::invalid_argument("box family normal must lie along the first box axis");
        const Lattice lat = box_lattice(F, {opt.n0, opt.n_cross, opt.n_cross, 1},
                                        {opt.samples_per_half0, opt.samples_per_half_cross, opt.samples_per_half_cross});
        const GridFunction f = sample_box(lat, F);
        FftOptions fo;
        fo.pad = {opt.pad0, 1, 1, 1};
        const GridFunction g = fft_multiplier_apply(f, MultiplierSymbol::half_space(bt.nt), fo);
        double bn = 0, bd = 0;
        for (long i = 0; i < g.size(); ++i) {
            const auto ix = lat.unflatten(i);
            const double q0 = std::abs(lat.local(0, ix[0]));
            if (q0 >= F.half[0] + opt.reach || std::abs(q0 - F.half[0]) <= opt.jump_gap) continue;
            const cplx ref = box_halfspace_image(F, bt.nt, lat.world(ix));
            bn += std::norm(g.values[i] - ref);
            bd += std::norm(ref);
            ++out.compared_points;
        }
        num += bn;
        den += bd;
        out.worst_box = std::max(out.worst_box, std::sqrt(bn / bd));
    }
    out.rel_l2 = std::sqrt(num / den);
    return out;
}

SquareFunctionResult square_function_v2(const BoxFamily& boxes, double p, const SquareFunctionOptions& opt,
                                        double eps_hat) {
    if (!(p >= 1) || p > 2) throw std::invalid_argument("p must lie in [1, 2)");
    if (p == 2 && !opt.allow_control) throw std::invalid_argument("p = 2 is only allowed as a control run");
    if (opt.mc_samples < 10000) throw std::invalid_argument("mc_samples must be at least 10^4");
    const int N = static_cast<int>(boxes.boxes.size());
    if (N == 0) throw std::invalid_argument("empty box family");

    SquareFunctionResult r;
    r.k = boxes.k;
    r.N = boxes.N;
    r.p = p;
    r.eps_hat = eps_hat >= 0 ? eps_hat : union_measure(boxes, opt.union_h).upper();

    std::vector<double> lhs(N), lhs_err(N), kappa(N), mean(N), var(N), vol(N), cross(N, 1.0);
    std::vector<std::pair<int, int>> axis(N);
    for (int j = 0; j < N; ++j) {
        const Box3& F = boxes.boxes[j].F;
        const Box3& Ft = boxes.boxes[j].Ft;
        axis[j] = normal_axis(F, boxes.boxes[j].nt);
        const Eigen::Vector3d qc = F.local(Ft.center);
        for (int b = 0; b < 3; ++b) {
            if (std::abs(std::abs(F.axes.col(b).dot(Ft.axes.col(b))) - 1) > 1e-12)
                throw std::invalid_argument("translate must share the axes of its box");
            if (b == axis[j].first) continue;
            cross[j] *= interval_overlap(qc[b], Ft.half[b], 0, F.half[b]);
        }
        const int a = axis[j].first;
        if (std::abs(qc[a]) <= F.half[a] + Ft.half[a])
            throw std::invalid_argument("translate must lie beyond its box along the normal");
    }
    const std::uint64_t per = std::max<std::uint64_t>(2, opt.mc_samples / N);

#pragma omp parallel for schedule(dynamic)
    for (int j = 0; j < N; ++j) {
        const Box3& F = boxes.boxes[j].F;
        const Box3& Ft = boxes.boxes[j].Ft;
        const auto [a, s] = axis[j];
        const Eigen::Vector3d qc = F.local(Ft.center);
        const double h = F.half[a];
        auto integrand = [&](double t) { return std::abs(halfline_projection_1d(-h, h, t, -s)); };
        const double t0 = qc[a] - Ft.half[a], t1 = qc[a] + Ft.half[a];
        const QuadResult qr = integrate_adaptive(integrand, t0, t1, opt.lhs_tol / std::max(cross[j], 1e-300), 0);
        lhs[j] = cross[j] * qr.value;
        lhs_err[j] = cross[j] * qr.error;
        double kmin = std::numeric_limits<double>::infinity();
        for (int i = 0; i <= 256; ++i) kmin = std::min(kmin, integrand(t0 + (t1 - t0) * i / 256.0));
        kappa[j] = cross[j] > 0 ? kmin : 0;

        // stratified Monte Carlo: E_{x ~ Unif(F_j)} count(x)^{p/2 - 1}
        const CounterRng rng(opt.seed, static_cast<std::uint64_t>(j));
        double sum = 0, sum2 = 0;
        for (std::uint64_t m = 0; m < per; ++m) {
            Eigen::Vector3d u;
            for (int c = 0; c < 3; ++c) u[c] = (2 * rng.uniform(3 * m + c) - 1) * F.half[c];
            const Eigen::Vector3d x = F.center + F.axes * u;
            int count = 1;
            for (int i = 0; i < N; ++i)
                if (i != j && boxes.boxes[i].F.contains(x)) ++count;
            const double v = std::pow(static_cast<double>(count), p / 2 - 1);
            sum += v;
            sum2 += v * v;
        }
        mean[j] = sum / per;
        var[j] = std::max(0.0, (sum2 - per * mean[j] * mean[j]) / (per - 1));
        vol[j] = F.volume();
    }

    double I = 0, varI = 0, vol_sum = 0;
    r.kappa = std::numeric_limits<double>::infinity();
    for (int j = 0; j < N; ++j) {
        r.lhs += lhs[j];
        r.lhs_error += lhs_err[j];
        r.kappa = std::min(r.kappa, kappa[j]);
        I += vol[j] * mean[j];
        varI += vol[j] * vol[j] * var[j] / per;
        vol_sum += vol[j];
    }
    const double seI = std::sqrt(varI);
    r.rhs_exact = std::pow(I, 1 / p);
    r.rhs_stderr = r.rhs_exact / (p * I) * seI;
    r.mc_flagged = seI > 0.1 * I;
    r.rhs_holder = std::sqrt(vol_sum) * std::pow(r.eps_hat, 1 / p - 0.5);
    return r;
}

ExperimentReport make_report(const SquareFunctionResult& sf, double c_p) {
    ExperimentReport r;
    r.sf = sf;
    r.ratio = sf.lhs / sf.rhs_exact;
    r.ratio_holder = sf.lhs / sf.rhs_holder;
    r.m_lower = r.ratio / c_p;
    r.mode = sf.p == 2 ? "control" : "test";
    return r;
}

std::vector<ExperimentReport> ratio_experiment(const RatioConfig& cfg) {
    if (!(cfg.c_p > 0)) throw std::invalid_argument("c_p must be positive");
    std::vector<ExperimentReport> out;
    for (int k : cfg.k_list) {
        const BoxFamily boxes = build_boxes(build_perron_rectangles(k));
        const double eps = union_measure(boxes, cfg.sf.union_h).upper();
        for (double p : cfg.p_list) out.push_back(make_report(square_function_v2(boxes, p, cfg.sf, eps), cfg.c_p));
    }
    return out;
}

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string csv_header() {
    return "k,N,eps_hat,p,lhs,rhs_exact,rhs_stderr,rhs_holder,ratio,ratio_holder,m_lower,wall_ms,mode\n";
}

std::string csv_row(const ExperimentReport& r) {
    const auto& s = r.sf;
    std::string row = std::to_string(s.k) + "," + std::to_string(s.N);
    for (double v : {s.eps_hat, s.p, s.lhs, s.rhs_exact, s.rhs_stderr, s.rhs_holder, r.ratio, r.ratio_holder, r.m_lower})
        row += "," + format_double(v);
    row += "," + format_double(r.wall_ms) + "," + r.mode + "\n";
    return row;
}

RandomSignResult random_sign_sweep(const BoxFamily& boxes, double p, const std::vector<double>& R_list,
                                   const RandomSignParams& prm) {
    if (!(p >= 1) || p > 2) throw std::invalid_argument("p must lie in [1, 2]");
    if (prm.trials < 1) throw std::invalid_argument("trials must be positive");
    for (double R : R_list)
        if (!(R >= 1)) throw std::invalid_argument("modulation R must be >= 1");
    const Lattice lat = Lattice::cube(3, prm.n, prm.L);
    const double dx = lat.dx(0), dV = lat.cell_volume();
    const int N = static_cast<int>(boxes.boxes.size());
    for (const auto& bt : boxes.boxes)
        if (2 * bt.F.half.minCoeff() < dx)
            throw std::invalid_argument("boxes are thinner than the lattice spacing");

    FftOptions fo;
    fo.pad = {prm.pad, prm.pad, prm.pad, 1};
    std::vector<Spectrum> spec;
    // sparse support of each F_j on the lattice, for ||f||_p
    std::vector<std::vector<std::pair<long, double>>> supp(N);
    for (int j = 0; j < N; ++j) {
        const GridFunction f = sample_box(lat, boxes.boxes[j].F);
        for (long i = 0; i < f.size(); ++i)
            if (f.values[i].real() != 0) supp[j].push_back({i, f.values[i].real()});
        spec.push_back(forward_spectrum(f, fo));
    }

    const long total = lat.size();
    const double r2max = prm.ball_radius * prm.ball_radius;
    std::vector<char> ball(total);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) ball[i] = lat.world(lat.unflatten(i)).squaredNorm() < r2max;

    std::vector<std::vector<int>> signs(prm.trials, std::vector<int>(N, 1));
    const CounterRng rng(prm.seed, 0x5167);
    for (int t = 1; t < prm.trials; ++t)
        for (int j = 0; j < N; ++j) signs[t][j] = (rng.bits(static_cast<std::uint64_t>(t) * N + j) & 1) ? 1 : -1;

    RandomSignResult out;
    for (double R : R_list) {
        std::vector<std::vector<cplx>> g(N);
        double dnum = 0, dden = 0;
        for (int j = 0; j < N; ++j) {
            const Eigen::Vector3d n = boxes.boxes[j].n;
            MultiplierSymbol cone = MultiplierSymbol::cone();
            cone.shift = R * Eigen::VectorXd(n);
            const MultiplierSymbol half = MultiplierSymbol::half_space(Eigen::VectorXd(boxes.boxes[j].nt));
            const long P = static_cast<long>(spec[j].data.size());
#pragma omp parallel for schedule(static) reduction(+ : dnum, dden)
            for (long q = 0; q < P; ++q) {
                double xi[3];
                spectrum_frequency(spec[j], q, xi);
                const double a = std::norm(spec[j].data[q]);
                const double mh = half(xi, 3);
                dnum += (cone(xi, 3) - mh) * (cone(xi, 3) - mh) * a;
                dden += mh * mh * a;
            }
            GridFunction G = inverse_with_symbol(spec[j], cone);
#pragma omp parallel for schedule(static)
            for (long i = 0; i < total; ++i) {
                if (!ball[i]) continue;
                const double ph = 2 * kPi * R * lat.world(lat.unflatten(i)).dot(n);
                G.values[i] *= cplx(std::cos(ph), std::sin(ph));
            }
            g[j] = std::move(G.values);
        }
        out.R.push_back(R);
        out.distance.push_back(std::sqrt(dnum / dden));

        double best = 0;
        for (int t = 0; t < prm.trials; ++t) {
            double l1 = 0;
#pragma omp parallel for schedule(static) reduction(+ : l1)
            for (long i = 0; i < total; ++i) {
                if (!ball[i]) continue;
                cplx v = 0;
                for (int j = 0; j < N; ++j) v += static_cast<double>(signs[t][j]) * g[j][i];
                l1 += std::abs(v);
            }
            // f = sum_j eps_j e^{2 pi i R <x, n_j>} 1_{F_j}, accumulated on the union of the supports
            std::vector<std::pair<long, cplx>> fv;
            for (int j = 0; j < N; ++j)
                for (const auto& [i, w] : supp[j]) {
                    const double ph = 2 * kPi * R * lat.world(lat.unflatten(i)).dot(boxes.boxes[j].n);
                    fv.push_back({i, static_cast<double>(signs[t][j]) * w * cplx(std::cos(ph), std::sin(ph))});
                }
            std::sort(fv.begin(), fv.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
            double lp = 0;
            for (std::size_t a = 0; a < fv.size();) {
                cplx v = 0;
                std::size_t b = a;
                for (; b < fv.size() && fv[b].first == fv[a].first; ++b) v += fv[b].second;
                if (ball[fv[a].first]) lp += std::pow(std::abs(v), p);
                a = b;
            }
            const double ratio = l1 * dV / std::pow(lp * dV, 1 / p);
            best = std::max(best, ratio);
        }
        out.ratio.push_back(best);
    }
    return out;
}

double random_sign_norm_lower_bound(const BoxFamily& boxes, double p, int trials, double R_mod,
                                    const RandomSignParams& params) {
    RandomSignParams prm = params;
    prm.trials = trials;
    return random_sign_sweep(boxes, p, {R_mod}, prm).ratio.at(0);
}

std::vector<double> modulation_trend(const BoxFamily& boxes, int j, const std::vector<double>& R_list,
                                     const TrendOptions& opt) {
    if (j < 0 || j >= static_cast<int>(boxes.boxes.size())) throw std::invalid_argument("box index out of range");
    const BoxTriple& bt = boxes.boxes[j];
    const Box3& F = bt.F;
    if (normal_axis(F, bt.nt).first != 0) throw std::invalid_argument("box family normal must lie along the first box axis");
    const double sph = opt.samples_per_half;
    const Lattice lat = box_lattice(F, opt.n, {sph, sph, sph});
    const GridFunction f = sample_box(lat, F);
    FftOptions fo;
    fo.pad = {opt.pad, opt.pad, opt.pad, 1};
    const Spectrum spec = forward_spectrum(f, fo);

    std::vector<char> mask(f.size());
    std::vector<cplx> ref(f.size());
    for (long i = 0; i < f.size(); ++i) {
        const auto ix = lat.unflatten(i);
        mask[i] = std::abs(std::abs(lat.local(0, ix[0])) - F.half[0]) > opt.jump_gap;
        if (mask[i]) ref[i] = box_halfspace_image(F, bt.nt, lat.world(ix));
    }
    std::vector<double> out;
    for (double R : R_list) {
        if (!(R >= 1)) throw std::invalid_argument("modulation R must be >= 1");
        MultiplierSymbol cone = MultiplierSymbol::cone();
        cone.shift = R * Eigen::VectorXd(bt.n);
        out.push_back(relative_l2(inverse_with_symbol(spec, cone).values, ref, mask));
    }
    return out;
}

double tensor_extension_check(const GridFunction& phi, int k, double normal4) {
    if (phi.lattice.rank != 1) throw std::invalid_argument("profile must live on a rank-1 lattice");
    const BoxFamily boxes = build_boxes(build_perron_rectangles(k));
    const BoxTriple& bt = boxes.boxes[0];
    const Lattice lat3 = box_lattice(bt.F, {32, 8, 8, 1}, {4, 2, 2});
    const GridFunction f3 = sample_box(lat3, bt.F);
    FftOptions fo;
    fo.pad = {2, 1, 1, 1};
    const GridFunction h3 = fft_multiplier_apply(f3, MultiplierSymbol::half_space(Eigen::VectorXd(bt.nt)), fo);

    Eigen::MatrixXd frame = Eigen::MatrixXd::Identity(4, 4);
    frame.topLeftCorner(3, 3) = bt.F.axes;
    frame(3, 3) = phi.lattice.frame(0, 0);
    Eigen::VectorXd center(4);
    center << bt.F.center, phi.lattice.center[0];
    const int n4 = phi.lattice.n[0];
    const Lattice lat4 = Lattice::aligned(frame, center, {lat3.n[0], lat3.n[1], lat3.n[2], n4},
                                          {lat3.L[0], lat3.L[1], lat3.L[2], phi.lattice.L[0]});
    GridFunction f4(lat4);
    std::vector<cplx> expect(lat4.size());
    for (long i = 0; i < f3.size(); ++i)
        for (int l = 0; l < n4; ++l) {
            f4.values[i * n4 + l] = f3.values[i] * phi.values[l];
            expect[i * n4 + l] = h3.values[i] * phi.values[l];
        }
    f4.support = {f3.support[0], f3.support[1], f3.support[2], phi.support[0]};
    Eigen::VectorXd normal(4);
    normal << bt.nt, normal4;
    const GridFunction h4 = fft_multiplier_apply(f4, MultiplierSymbol::half_space(normal), fo);
    return relative_l2(h4.values, expect);
}

} // namespace conemult
