#include "cgt/graph.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <numeric>
#include <sstream>

#include "cgt/rng.hpp"

namespace cgt {

namespace {

constexpr double kStochTol = 1e-12;
constexpr long kPowerIterCap = 100000;

std::string fmt17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

// Strongly connected components (iterative Tarjan) of the digraph given by an
// adjacency support; adj[i] lists successors of i. Returns component id per
// node, components numbered in reverse topological order.
std::vector<int> tarjan_scc(const std::vector<std::vector<int>>& adj, int& n_comps) {
    const int n = static_cast<int>(adj.size());
    std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
    std::vector<bool> on_stack(n, false);
    std::vector<int> stack;
    int next_index = 0;
    n_comps = 0;

    struct Frame {
        int node;
        std::size_t child;
    };
    for (int start = 0; start < n; ++start) {
        if (index[start] != -1) continue;
        std::vector<Frame> frames{{start, 0}};
        index[start] = low[start] = next_index++;
        stack.push_back(start);
        on_stack[start] = true;
        while (!frames.empty()) {
            Frame& f = frames.back();
            if (f.child < adj[f.node].size()) {
                const int w = adj[f.node][f.child++];
                if (index[w] == -1) {
                    index[w] = low[w] = next_index++;
                    stack.push_back(w);
                    on_stack[w] = true;
                    frames.push_back({w, 0});
                } else if (on_stack[w]) {
                    low[f.node] = std::min(low[f.node], index[w]);
                }
            } else {
                const int node = f.node;
                frames.pop_back();
                if (!frames.empty()) {
                    low[frames.back().node] = std::min(low[frames.back().node], low[node]);
                }
                if (low[node] == index[node]) {
                    while (true) {
                        const int w = stack.back();
                        stack.pop_back();
                        on_stack[w] = false;
                        comp[w] = n_comps;
                        if (w == node) break;
                    }
                    ++n_comps;
                }
            }
        }
    }
    return comp;
}

std::vector<std::vector<int>> support_digraph(const Eigen::MatrixXd& W) {
    // Edge i -> j iff node i's value reaches node j, i.e. W(j, i) > 0.
    const int n = static_cast<int>(W.rows());
    std::vector<std::vector<int>> adj(n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (W(j, i) > 0.0 && i != j) adj[i].push_back(j);
    return adj;
}

// Does the digraph contain a spanning tree (some root reaches every node)?
// Equivalent to its condensation having exactly one source component.
bool has_spanning_tree(const std::vector<std::vector<int>>& adj) {
    const int n = static_cast<int>(adj.size());
    if (n == 0) return false;
    int n_comps = 0;
    const std::vector<int> comp = tarjan_scc(adj, n_comps);
    std::vector<bool> has_in(n_comps, false);
    for (int i = 0; i < n; ++i)
        for (int j : adj[i])
            if (comp[i] != comp[j]) has_in[comp[j]] = true;
    int sources = 0;
    for (int c = 0; c < n_comps; ++c)
        if (!has_in[c]) ++sources;
    return sources == 1;
}

bool is_strongly_connected(const std::vector<std::vector<int>>& adj) {
    int n_comps = 0;
    tarjan_scc(adj, n_comps);
    return n_comps == 1;
}

// Weight matrix in "receiver-major" layout: W(to, from) = link weight.
Eigen::MatrixXd weights_from_edges(int n, const std::vector<Edge>& edges) {
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
    for (const Edge& e : edges) {
        if (e.from < 1 || e.from > n || e.to < 1 || e.to > n)
            throw WeightError("edge (" + std::to_string(e.from) + "," + std::to_string(e.to) +
                              ") out of range for N=" + std::to_string(n));
        if (e.weight < 0.0)
            throw WeightError("negative edge weight on (" + std::to_string(e.from) + "," +
                              std::to_string(e.to) + ")");
        W(e.to - 1, e.from - 1) += e.weight;
    }
    return W;
}

Eigen::MatrixXd generate_support(const GraphSpec& spec) {
    const int n = spec.n_agents;
    Eigen::MatrixXd W = Eigen::MatrixXd::Zero(n, n);
    W.diagonal().setOnes();
    switch (spec.kind) {
    case GraphKind::directed_ring:
        // Agent i receives from agent i+1 (mod N).
        for (int i = 0; i < n; ++i) W(i, (i + 1) % n) = 1.0;
        break;
    case GraphKind::random_strongly_connected: {
        auto rng = rng::make(rng::derive(spec.seed, 0x6772617068ULL)); // "graph"
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j && rng::uniform01(rng) < spec.density) W(i, j) = 1.0;
        std::vector<std::vector<int>> adj = support_digraph(W);
        if (!is_strongly_connected(adj)) {
            // Repair: overlay a random cycle through all nodes.
            std::vector<int> order(n);
            std::iota(order.begin(), order.end(), 0);
            rng::shuffle(rng, order);
            for (int i = 0; i < n; ++i) W(order[(i + 1) % n], order[i]) = 1.0;
        }
        break;
    }
    case GraphKind::explicit_edges:
        throw Error("generate_support called with explicit edges");
    }
    return W;
}

void check_spec(const GraphSpec& spec) {
    if (spec.n_agents < 1) throw Error("GraphSpec.n_agents must be >= 1");
    if (spec.kind == GraphKind::random_strongly_connected &&
        !(spec.density > 0.0 && spec.density <= 1.0))
        throw Error("GraphSpec.density must lie in (0, 1]");
}

} // namespace

bool ValidationReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(),
                       [](const ValidationCheck& c) { return c.passed; });
}

std::string ValidationReport::summary() const {
    std::string out;
    for (const ValidationCheck& c : checks) {
        out += (c.passed ? "[pass] " : "[FAIL] ") + c.name;
        if (!c.detail.empty()) out += " (" + c.detail + ")";
        out += '\n';
    }
    return out;
}

ValidationReport validate_assumption4(const Eigen::MatrixXd& R, const Eigen::MatrixXd& C) {
    ValidationReport rep;
    const int n = static_cast<int>(R.rows());
    auto add = [&rep](std::string name, bool ok, std::string detail = "") {
        rep.checks.push_back({std::move(name), ok, std::move(detail)});
    };

    const bool shape_ok = R.rows() == R.cols() && C.rows() == C.cols() && R.rows() == C.rows();
    add("square matrices of equal size", shape_ok);
    if (!shape_ok) return rep;

    add("nonnegative entries", (R.array() >= 0.0).all() && (C.array() >= 0.0).all());

    const double row_err = (R.rowwise().sum().array() - 1.0).abs().maxCoeff();
    add("R row-stochastic", row_err <= kStochTol, "max row-sum error " + fmt17(row_err));
    const double col_err = (C.colwise().sum().array() - 1.0).abs().maxCoeff();
    add("C column-stochastic", col_err <= kStochTol, "max col-sum error " + fmt17(col_err));

    add("positive diagonals",
        (R.diagonal().array() > 0.0).all() && (C.diagonal().array() > 0.0).all());

    add("G_R contains a spanning tree", has_spanning_tree(support_digraph(R)));
    // G_{C^T} has edge i -> l iff C(l, i) > 0, i.e. the support of C read the
    // same receiver-major way as R.
    add("G_{C^T} strongly connected", is_strongly_connected(support_digraph(C)));
    (void)n;
    return rep;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd>
compute_eigenvectors(const Eigen::MatrixXd& R, const Eigen::MatrixXd& C) {
    const int n = static_cast<int>(R.rows());
    const auto power_fixed_point = [n](auto apply, const char* what) {
        Eigen::VectorXd w = Eigen::VectorXd::Constant(n, 1.0 / n);
        for (long it = 0; it < kPowerIterCap; ++it) {
            Eigen::VectorXd next = apply(w);
            next /= next.lpNorm<1>();
            const double resid = (apply(next) - next).template lpNorm<Eigen::Infinity>();
            w = next;
            if (resid <= 1e-12) return w;
        }
        throw NoConvergence(std::string("power iteration for ") + what +
                            " did not reach tolerance (near-reducible graph?)");
    };
    Eigen::VectorXd u =
        power_fixed_point([&R](const Eigen::VectorXd& w) -> Eigen::VectorXd { return R.transpose() * w; },
                          "left eigenvector of R");
    Eigen::VectorXd v =
        power_fixed_point([&C](const Eigen::VectorXd& w) -> Eigen::VectorXd { return C * w; },
                          "right eigenvector of C");
    u *= static_cast<double>(n) / u.sum();
    v *= static_cast<double>(n) / v.sum();
    return {u, v};
}

double spectral_radius_deflated(const Eigen::MatrixXd& M, const Eigen::VectorXd& a,
                                const Eigen::VectorXd& b, std::uint64_t seed) {
    const int n = static_cast<int>(M.rows());
    const double N = static_cast<double>(n);
    const auto apply = [&](const Eigen::VectorXd& z) -> Eigen::VectorXd {
        return M * z - a * (b.dot(z) / N);
    };

    auto rng = rng::make(seed);
    Eigen::VectorXd x(n);
    for (int i = 0; i < n; ++i) x(i) = rng::normal_pair(rng)[0];
    x.normalize();

    constexpr double rtol = 1e-10;
    for (long it = 0; it < kPowerIterCap; ++it) {
        const Eigen::VectorXd y = apply(x);
        const double lam = x.dot(y);
        if ((y - lam * x).norm() <= rtol * std::abs(lam) + 1e-300) return std::abs(lam);

        const double ny = y.norm();
        if (ny <= 1e-300) return 0.0; // annihilated: nilpotent or zero matrix

        // Complex dominant pair: fit the two-step recurrence w = p y + q x and
        // read the radius off the roots of t^2 - p t - q.
        const Eigen::VectorXd w = apply(y);
        const double yy = y.squaredNorm(), xy = x.dot(y), xx = 1.0;
        const double det = yy * xx - xy * xy;
        if (det > 1e-14 * yy) {
            const double wy = w.dot(y), wx = w.dot(x);
            const double p = (wy * xx - wx * xy) / det;
            const double q = (wx * yy - wy * xy) / det;
            if ((w - p * y - q * x).norm() <= rtol * std::max(w.norm(), 1e-300)) {
                const double disc = 0.25 * p * p + q;
                if (disc >= 0.0) {
                    const double s = std::sqrt(disc);
                    return std::max(std::abs(0.5 * p + s), std::abs(0.5 * p - s));
                }
                return std::sqrt(-q);
            }
        }
        x = y / ny;
    }
    throw NoConvergence("deflated power iteration did not reach tolerance");
}

MixingPair build_mixing_pair(const GraphSpec& spec) {
    check_spec(spec);
    const int n = spec.n_agents;

    Eigen::MatrixXd W = spec.kind == GraphKind::explicit_edges ? weights_from_edges(n, spec.edges)
                                                               : generate_support(spec);
    if ((W.diagonal().array() <= 0.0).any())
        throw WeightError("every node needs a self-loop with positive weight");

    const std::vector<std::vector<int>> adj = support_digraph(W);
    if (!has_spanning_tree(adj))
        throw ConnectivityError("G_R lacks a spanning tree");
    if (!is_strongly_connected(adj))
        throw ConnectivityError("G_{C^T} is not strongly connected");

    MixingPair mp;
    mp.n_agents = n;
    mp.R = W.array().colwise() / W.rowwise().sum().array();
    mp.C = W.array().rowwise() / W.colwise().sum().array();
    std::tie(mp.u, mp.v) = compute_eigenvectors(mp.R, mp.C);
    mp.rho_R = spectral_radius_deflated(mp.R, Eigen::VectorXd::Ones(n), mp.u);
    mp.rho_C = spectral_radius_deflated(mp.C, mp.v, Eigen::VectorXd::Ones(n));
    return mp;
}

std::string MixingPair::to_text() const {
    std::string out = "N=" + std::to_string(n_agents) + "\n";
    const auto emit = [&out, this](const Eigen::MatrixXd& M) {
        for (int i = 0; i < n_agents; ++i) {
            for (int j = 0; j < n_agents; ++j) {
                if (j) out += ' ';
                out += fmt17(M(i, j));
            }
            out += '\n';
        }
    };
    emit(R);
    out += '\n';
    emit(C);
    return out;
}

MixingPair MixingPair::from_text(std::istream& in) {
    std::string header;
    if (!std::getline(in, header) || header.rfind("N=", 0) != 0)
        throw ParseError(1, "expected 'N=<int>' header");
    MixingPair mp;
    mp.n_agents = std::stoi(header.substr(2));
    const int n = mp.n_agents;
    mp.R.resize(n, n);
    mp.C.resize(n, n);
    long lineno = 1;
    const auto read_matrix = [&](Eigen::MatrixXd& M) {
        std::string line;
        for (int i = 0; i < n; ++i) {
            if (!std::getline(in, line)) throw ParseError(lineno + 1, "unexpected end of matrix");
            ++lineno;
            std::istringstream row(line);
            for (int j = 0; j < n; ++j)
                if (!(row >> M(i, j))) throw ParseError(lineno, "bad matrix entry");
        }
    };
    read_matrix(mp.R);
    std::string blank;
    std::getline(in, blank);
    ++lineno;
    read_matrix(mp.C);
    std::tie(mp.u, mp.v) = compute_eigenvectors(mp.R, mp.C);
    mp.rho_R = spectral_radius_deflated(mp.R, Eigen::VectorXd::Ones(n), mp.u);
    mp.rho_C = spectral_radius_deflated(mp.C, mp.v, Eigen::VectorXd::Ones(n));
    return mp;
}

} // namespace cgt
