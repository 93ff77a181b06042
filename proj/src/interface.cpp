#include "degen/interface.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <unordered_map>

namespace degen {

LevelSetGeometry::LevelSetGeometry(const FieldExpression& phi)
    : phi_(phi), fx_(phi.dx()), fy_(phi.dy()), fxx_(fx_.dx()), fxy_(fx_.dy()), fyy_(fy_.dy()),
      fxxx_(fxx_.dx()), fxxy_(fxx_.dy()), fxyy_(fxy_.dy()), fyyy_(fyy_.dy()) {}

LevelSetGeometry::Frame LevelSetGeometry::frame(Vec2 p) const {
    const double px = fx_(p), py = fy_(p);
    const double pxx = fxx_(p), pxy = fxy_(p), pyy = fyy_(p);
    const double G = std::hypot(px, py);
    Frame f;
    f.grad_norm = G;
    if (G == 0.0) return f;
    f.normal = {px / G, py / G};
    f.tangent = {py / G, -px / G};
    const Vec2 t = f.tangent;

    // kappa = -t^T H t / |grad| = -Q / G^3 with Q = py^2 pxx - 2 px py pxy + px^2 pyy.
    const double Q = py * py * pxx - 2.0 * px * py * pxy + px * px * pyy;
    f.curvature = -Q / (G * G * G);

    const double pxxx = fxxx_(p), pxxy = fxxy_(p), pxyy = fxyy_(p), pyyy = fyyy_(p);
    const double Dpx = t.x * pxx + t.y * pxy;
    const double Dpy = t.x * pxy + t.y * pyy;
    const double Dpxx = t.x * pxxx + t.y * pxxy;
    const double Dpxy = t.x * pxxy + t.y * pxyy;
    const double Dpyy = t.x * pxyy + t.y * pyyy;
    const double DG = (px * Dpx + py * Dpy) / G;
    const double DQ = 2.0 * py * Dpy * pxx + py * py * Dpxx -
                      2.0 * (Dpx * py * pxy + px * Dpy * pxy + px * py * Dpxy) + 2.0 * px * Dpx * pyy +
                      px * px * Dpyy;
    f.curvature_ds = -DQ / (G * G * G) + 3.0 * Q * DG / (G * G * G * G);
    return f;
}

Vec2 LevelSetGeometry::project(Vec2 p) const {
    for (int it = 0; it < 30; ++it) {
        const double v = phi_(p);
        const Vec2 g = gradient(p);
        const double g2 = dot(g, g);
        if (g2 == 0.0) break;
        const Vec2 step = (v / g2) * g;
        p -= step;
        if (norm(step) <= 1e-15 * std::max(1.0, norm(p))) break;
    }
    return p;
}

Vec2 InterfaceCurve::at(double s) const {
    const double h = spacing();
    s = std::fmod(s, length);
    if (s < 0.0) s += length;
    const std::size_t n = points.size();
    const double u = s / h;
    std::size_t k = static_cast<std::size_t>(u);
    if (k >= n) k = n - 1;
    const double tau = u - static_cast<double>(k);
    const std::size_t k1 = (k + 1) % n;
    const double h00 = (1 + 2 * tau) * (1 - tau) * (1 - tau);
    const double h10 = tau * (1 - tau) * (1 - tau);
    const double h01 = tau * tau * (3 - 2 * tau);
    const double h11 = tau * tau * (tau - 1);
    const Vec2 p = h00 * points[k] + (h10 * h) * tangents[k] + h01 * points[k1] + (h11 * h) * tangents[k1];
    return geometry->project(p);
}

LevelSetGeometry::Frame InterfaceCurve::frame_at(double s) const { return geometry->frame(at(s)); }

namespace {

struct Loops {
    int components = 0;
    bool touches_box = false;
    double perimeter = 0.0;  // of the component holding `start`
    Vec2 start;
    bool any = false;
};

class UnionFind {
public:
    int add() {
        parent_.push_back(static_cast<int>(parent_.size()));
        return parent_.back();
    }
    int find(int a) {
        while (parent_[a] != a) a = parent_[a] = parent_[parent_[a]];
        return a;
    }
    void unite(int a, int b) { parent_[find(a)] = find(b); }
    [[nodiscard]] int size() const { return static_cast<int>(parent_.size()); }

private:
    std::vector<int> parent_;
};

Loops marching_squares(const FieldExpression& phi, const BoundingBox& box, int n) {
    const double hx = (box.x_max - box.x_min) / n;
    const double hy = (box.y_max - box.y_min) / n;
    const int m = n + 1;
    std::vector<double> v(static_cast<std::size_t>(m) * m);
    for (int j = 0; j < m; ++j) {
        for (int i = 0; i < m; ++i) v[static_cast<std::size_t>(j) * m + i] = phi(box.x_min + i * hx, box.y_min + j * hy);
    }
    auto val = [&](int i, int j) { return v[static_cast<std::size_t>(j) * m + i]; };
    Loops out;
    const bool has_pos = std::any_of(v.begin(), v.end(), [](double a) { return a > 0.0; });
    const bool has_neg = std::any_of(v.begin(), v.end(), [](double a) { return a < 0.0; });
    if (!has_pos || !has_neg) return out;
    auto pos = [&](int i, int j) { return val(i, j) > 0.0; };

    std::unordered_map<long long, int> edge_id;
    std::vector<Vec2> edge_point;
    UnionFind uf;

    // Edge keys: horizontal (i,j)-(i+1,j) -> 2*(j*m+i), vertical (i,j)-(i,j+1) -> 2*(j*m+i)+1.
    auto edge = [&](int i, int j, bool vertical) {
        const long long key = 2LL * (static_cast<long long>(j) * m + i) + (vertical ? 1 : 0);
        auto it = edge_id.find(key);
        if (it != edge_id.end()) return it->second;
        const int id = uf.add();
        edge_id.emplace(key, id);
        const int i2 = vertical ? i : i + 1;
        const int j2 = vertical ? j + 1 : j;
        const double a = val(i, j), b = val(i2, j2);
        const double t = a / (a - b);
        const Vec2 pa{box.x_min + i * hx, box.y_min + j * hy};
        const Vec2 pb{box.x_min + i2 * hx, box.y_min + j2 * hy};
        edge_point.push_back(pa + t * (pb - pa));
        if ((vertical && (i == 0 || i == n)) || (!vertical && (j == 0 || j == n))) out.touches_box = true;
        return id;
    };

    std::vector<std::pair<int, int>> segments;
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < n; ++i) {
            const bool s0 = pos(i, j), s1 = pos(i + 1, j), s2 = pos(i + 1, j + 1), s3 = pos(i, j + 1);
            int e[4];
            int cnt = 0;
            bool cut[4] = {s0 != s1, s1 != s2, s3 != s2, s0 != s3};
            if (cut[0]) e[0] = edge(i, j, false), ++cnt;
            if (cut[1]) e[1] = edge(i + 1, j, true), ++cnt;
            if (cut[2]) e[2] = edge(i, j + 1, false), ++cnt;
            if (cut[3]) e[3] = edge(i, j, true), ++cnt;
            if (cnt == 2) {
                int pair[2];
                int k = 0;
                for (int q = 0; q < 4; ++q) {
                    if (cut[q]) pair[k++] = e[q];
                }
                segments.emplace_back(pair[0], pair[1]);
            } else if (cnt == 4) {
                const double centre = 0.25 * (val(i, j) + val(i + 1, j) + val(i + 1, j + 1) + val(i, j + 1));
                if ((centre > 0.0) == s0) {
                    segments.emplace_back(e[0], e[1]);
                    segments.emplace_back(e[2], e[3]);
                } else {
                    segments.emplace_back(e[3], e[0]);
                    segments.emplace_back(e[1], e[2]);
                }
            }
        }
    }
    if (segments.empty()) return out;
    out.any = true;
    for (const auto& [a, b] : segments) uf.unite(a, b);
    std::vector<int> roots;
    for (int k = 0; k < uf.size(); ++k) roots.push_back(uf.find(k));
    std::sort(roots.begin(), roots.end());
    out.components = static_cast<int>(std::unique(roots.begin(), roots.end()) - roots.begin());
    const int root = uf.find(segments.front().first);
    out.start = edge_point[segments.front().first];
    for (const auto& [a, b] : segments) {
        if (uf.find(a) == root) out.perimeter += norm(edge_point[a] - edge_point[b]);
    }
    return out;
}

std::string where(Vec2 p) {
    std::ostringstream os;
    os << "(" << p.x << ", " << p.y << ")";
    return os.str();
}

// Gauss-Newton descent on phi^2 from the lattice node with the smallest |phi|.
[[noreturn]] void diagnose_missing_crossing(const FieldExpression& phi, const LevelSetGeometry& geo,
                                             const BoundingBox& box, int n) {
    Vec2 best{};
    double best_abs = INFINITY;
    double max_abs = 0.0;
    for (int j = 0; j <= n; ++j) {
        for (int i = 0; i <= n; ++i) {
            const Vec2 p{box.x_min + (box.x_max - box.x_min) * i / n, box.y_min + (box.y_max - box.y_min) * j / n};
            const double a = std::abs(phi(p));
            max_abs = std::max(max_abs, a);
            if (a < best_abs) best_abs = a, best = p;
        }
    }
    Vec2 p = best;
    for (int it = 0; it < 400; ++it) {
        const double v = phi(p);
        const Vec2 g = geo.gradient(p);
        const double g2 = dot(g, g);
        if (std::abs(v) < 1e-15 * std::max(1.0, max_abs) || g2 == 0.0) break;
        p -= (v / g2) * g;
    }
    const double diam = std::hypot(box.x_max - box.x_min, box.y_max - box.y_min);
    const double grad_scale = std::max(max_abs, 1e-300) / diam;
    if (std::abs(phi(p)) <= 1e-10 * std::max(1.0, max_abs)) {
        if (norm(geo.gradient(p)) <= 1e-4 * grad_scale) {
            throw InterfaceError("grad(phi) vanishes on the zero set at " + where(p) +
                                 "; phi does not change sign across it");
        }
        throw InterfaceError("zero set of phi found at " + where(p) + " but phi does not change sign there");
    }
    throw InterfaceError("zero set of phi is empty inside the bounding box");
}

// One classical RK4 step along the unit tangent field followed by projection.
Vec2 tangent_step(const LevelSetGeometry& geo, Vec2 p, double h) {
    auto t = [&](Vec2 q) {
        const Vec2 g = geo.gradient(q);
        const double G = norm(g);
        if (G == 0.0) throw InterfaceError("grad(phi) vanishes on the zero set at " + where(q));
        return Vec2{g.y / G, -g.x / G};
    };
    const Vec2 k1 = t(p);
    const Vec2 k2 = t(p + (0.5 * h) * k1);
    const Vec2 k3 = t(p + (0.5 * h) * k2);
    const Vec2 k4 = t(p + h * k3);
    return geo.project(p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

}  // namespace

InterfaceCurve extract_interface(const FieldExpression& phi, std::size_t n_samples, const BoundingBox& box,
                                 int lattice) {
    if (n_samples < 8) throw InterfaceError("need at least 8 interface samples");
    auto geo = std::make_shared<const LevelSetGeometry>(phi);
    const Loops loops = marching_squares(phi, box, lattice);
    if (!loops.any) diagnose_missing_crossing(phi, *geo, box, lattice);
    if (loops.touches_box) throw InterfaceError("zero set of phi is not closed inside the bounding box");
    if (loops.components != 1) {
        throw InterfaceError("zero set of phi has " + std::to_string(loops.components) +
                             " components; expected a single closed curve");
    }

    const Vec2 p0 = geo->project(loops.start);
    const auto f0 = geo->frame(p0);
    const double grad_tol = 1e-8 * std::max(1.0, norm(geo->gradient(loops.start)));
    if (f0.grad_norm <= grad_tol) throw InterfaceError("grad(phi) vanishes on the zero set at " + where(p0));

    // Pass 1: total length by closure detection against the normal line through p0.
    const double h = loops.perimeter / 8192.0;
    const std::size_t max_steps = 4 * 8192;
    Vec2 p = p0;
    double s = 0.0;
    double length = -1.0;
    for (std::size_t k = 0; k < max_steps; ++k) {
        const Vec2 q = tangent_step(*geo, p, h);
        const double tp = dot(p - p0, f0.tangent);
        const double tq = dot(q - p0, f0.tangent);
        if (s > 0.5 * loops.perimeter && tp < 0.0 && tq >= 0.0 && norm(q - p0) < 4.0 * h) {
            // secant on the partial step length
            double a = 0.0, b = h, fa = tp, fb = tq;
            for (int it = 0; it < 60 && b - a > 1e-16 * h; ++it) {
                const double c = std::clamp(a - fa * (b - a) / (fb - fa), a + 1e-3 * (b - a), b - 1e-3 * (b - a));
                const double fc = dot(tangent_step(*geo, p, c) - p0, f0.tangent);
                if (fc < 0.0) a = c, fa = fc; else b = c, fb = fc;
                if (std::abs(fc) < 1e-15) { a = b = c; break; }
            }
            length = s + 0.5 * (a + b);
            break;
        }
        p = q;
        s += h;
    }
    if (length <= 0.0) throw InterfaceError("tracing the zero set of phi did not close");

    // Pass 2: uniform arc-length samples.
    InterfaceCurve curve;
    curve.geometry = geo;
    curve.length = length;
    const double delta = length / static_cast<double>(n_samples);
    const int sub = std::max(1, static_cast<int>(std::ceil(delta / h)));
    const double hs = delta / sub;
    curve.points.reserve(n_samples);
    p = p0;
    for (std::size_t k = 0; k < n_samples; ++k) {
        curve.points.push_back(p);
        for (int q = 0; q < sub; ++q) p = tangent_step(*geo, p, hs);
    }
    if (norm(p - p0) > 1e-7 * length) {
        throw InterfaceError("arc-length resampling failed to close (gap " + std::to_string(norm(p - p0)) + ")");
    }
    for (const Vec2& q : curve.points) {
        const auto f = geo->frame(q);
        if (f.grad_norm <= grad_tol) throw InterfaceError("grad(phi) vanishes on the zero set at " + where(q));
        curve.tangents.push_back(f.tangent);
        curve.normals.push_back(f.normal);
        curve.curvature.push_back(f.curvature);
        curve.curvature_ds.push_back(f.curvature_ds);
        curve.grad_norm.push_back(f.grad_norm);
    }
    return curve;
}

}  // namespace degen
