#include "stq/metric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <unordered_set>

namespace stq {

MetricInstance MetricInstance::from_weights(int n, std::vector<PointId> terminals,
                                            std::vector<Weight> weights) {
    if (n <= 0) throw std::invalid_argument("instance needs at least one point");
    if (weights.size() != static_cast<std::size_t>(n) * n)
        throw std::invalid_argument("weight matrix size mismatch");
    if (terminals.empty() || terminals.size() > static_cast<std::size_t>(n))
        throw std::invalid_argument("terminal count must satisfy 1 <= k <= n");

    std::unordered_set<PointId> seen;
    for (PointId t : terminals) {
        if (t < 0 || t >= n) throw std::invalid_argument("terminal id out of range");
        if (!seen.insert(t).second) throw std::invalid_argument("duplicate terminal id");
    }

    for (int u = 0; u < n; ++u) {
        if (weights[static_cast<std::size_t>(u) * n + u] != 0.0)
            throw std::invalid_argument("nonzero diagonal entry");
        for (int v = u + 1; v < n; ++v) {
            Weight a = weights[static_cast<std::size_t>(u) * n + v];
            Weight b = weights[static_cast<std::size_t>(v) * n + u];
            if (a != b) throw std::invalid_argument("weight matrix not symmetric");
            if (a < 0.0 || !std::isfinite(a))
                throw std::invalid_argument("weights must be finite and nonnegative");
        }
    }

    MetricInstance m;
    m.n_ = n;
    m.terminals_ = std::move(terminals);
    m.weights_ = std::move(weights);
    m.is_terminal_.assign(static_cast<std::size_t>(n), 0);
    for (PointId t : m.terminals_) m.is_terminal_[static_cast<std::size_t>(t)] = 1;
    return m;
}

std::vector<PointId> MetricInstance::steiner_points() const {
    std::vector<PointId> out;
    out.reserve(static_cast<std::size_t>(n_) - terminals_.size());
    for (PointId v = 0; v < n_; ++v)
        if (!is_terminal_[static_cast<std::size_t>(v)]) out.push_back(v);
    return out;
}

void MetricInstance::check_ids(PointId u, PointId v) const {
    if (u < 0 || u >= n_ || v < 0 || v >= n_)
        throw std::invalid_argument("point id out of range");
    if (u == v) throw std::invalid_argument("invalid pair: identical endpoints");
}

std::optional<TriangleViolation> verify_triangle_inequality(const MetricInstance& instance) {
    const int n = instance.n();
    for (PointId a = 0; a < n; ++a) {
        for (PointId b = 0; b < n; ++b) {
            if (b == a) continue;
            const Weight wab = instance.weight(a, b);
            for (PointId c = 0; c < n; ++c) {
                if (c == a || c == b) continue;
                if (wab > instance.weight(a, c) + instance.weight(c, b) + 1e-9)
                    return TriangleViolation{a, b, c};
            }
        }
    }
    return std::nullopt;
}

CountingOracle::CountingOracle(const MetricInstance& instance, std::optional<std::uint64_t> budget)
    : instance_(&instance), budget_(budget) {
    const std::uint64_t pairs =
        static_cast<std::uint64_t>(instance.n()) * (instance.n() - 1) / 2;
    queried_.assign(static_cast<std::size_t>((pairs + 63) / 64), 0);
}

std::size_t CountingOracle::pair_index(PointId u, PointId v) const {
    if (u > v) std::swap(u, v);
    const std::uint64_t n = static_cast<std::uint64_t>(instance_->n());
    // Triangular index of the unordered pair (u, v), u < v.
    return static_cast<std::size_t>(static_cast<std::uint64_t>(u) * (2 * n - u - 1) / 2 +
                                    (static_cast<std::uint64_t>(v) - u - 1));
}

bool CountingOracle::was_queried(PointId u, PointId v) const {
    instance_->check_ids(u, v);
    const std::size_t idx = pair_index(u, v);
    return (queried_[idx >> 6] >> (idx & 63)) & 1u;
}

Weight CountingOracle::query(PointId u, PointId v) {
    instance_->check_ids(u, v);
    const std::size_t idx = pair_index(u, v);
    const std::uint64_t bit = 1ULL << (idx & 63);
    if (!(queried_[idx >> 6] & bit)) {
        if (budget_ && count_ >= *budget_)
            throw QueryBudgetError("query budget of " + std::to_string(*budget_) + " exhausted");
        queried_[idx >> 6] |= bit;
        ++count_;
    }
    return instance_->weight(u, v);
}

std::vector<PointId> SteinerTree::vertex_set() const {
    std::vector<PointId> vs;
    vs.reserve(edges.size() * 2);
    for (const Edge& e : edges) {
        vs.push_back(e.u);
        vs.push_back(e.v);
    }
    std::sort(vs.begin(), vs.end());
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
    return vs;
}

namespace {

struct Dsu {
    std::vector<int> parent;
    explicit Dsu(int n) : parent(n) {
        for (int i = 0; i < n; ++i) parent[i] = i;
    }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool merge(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[a] = b;
        return true;
    }
};

}  // namespace

bool SteinerTree::valid_for(const MetricInstance& instance, double rel_tol) const {
    const std::vector<PointId> vs = vertex_set();
    if (instance.k() == 1 && edges.empty()) return cost == 0.0;

    Dsu dsu(instance.n());
    double sum = 0.0;
    for (const Edge& e : edges) {
        if (e.u < 0 || e.u >= instance.n() || e.v < 0 || e.v >= instance.n() || e.u == e.v)
            return false;
        if (!dsu.merge(e.u, e.v)) return false;  // cycle
        sum += e.w;
    }
    // Connected: #vertices == #edges + 1.
    if (vs.size() != edges.size() + 1) return false;
    for (PointId t : instance.terminals()) {
        if (!std::binary_search(vs.begin(), vs.end(), t)) return false;
    }
    const double tol = rel_tol * std::max(1.0, std::abs(cost));
    return std::abs(sum - cost) <= tol;
}

MetricInstance induced_terminal_metric(CountingOracle& oracle) {
    const std::vector<PointId>& ts = oracle.instance().terminals();
    const int k = static_cast<int>(ts.size());
    std::vector<Weight> w(static_cast<std::size_t>(k) * k, 0.0);
    for (int i = 0; i < k; ++i) {
        for (int j = i + 1; j < k; ++j) {
            const Weight d = oracle.query(ts[i], ts[j]);
            w[static_cast<std::size_t>(i) * k + j] = d;
            w[static_cast<std::size_t>(j) * k + i] = d;
        }
    }
    std::vector<PointId> terminals(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) terminals[static_cast<std::size_t>(i)] = i;
    return MetricInstance::from_weights(k, std::move(terminals), std::move(w));
}

void save_instance(const MetricInstance& instance, std::ostream& out) {
    out.precision(17);
    out << instance.n() << ' ' << instance.k() << '\n';
    for (std::size_t i = 0; i < instance.terminals().size(); ++i) {
        if (i) out << ' ';
        out << instance.terminals()[i];
    }
    out << '\n';
    for (int u = 0; u < instance.n(); ++u) {
        for (int v = 0; v < instance.n(); ++v) {
            if (v) out << ' ';
            out << instance.weight(u, v);
        }
        out << '\n';
    }
}

void save_instance_file(const MetricInstance& instance, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open " + path + " for writing");
    save_instance(instance, out);
}

MetricInstance load_instance(std::istream& in, bool validate_triangle) {
    int n = 0, k = 0;
    if (!(in >> n >> k)) throw std::runtime_error("instance header parse error");
    if (n <= 0 || k <= 0 || k > n) throw std::runtime_error("invalid instance header");
    std::vector<PointId> terminals(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i)
        if (!(in >> terminals[static_cast<std::size_t>(i)]))
            throw std::runtime_error("terminal list parse error");
    std::vector<Weight> w(static_cast<std::size_t>(n) * n);
    for (std::size_t i = 0; i < w.size(); ++i)
        if (!(in >> w[i])) throw std::runtime_error("weight matrix parse error");
    MetricInstance m = MetricInstance::from_weights(n, std::move(terminals), std::move(w));
    if (validate_triangle) {
        if (auto bad = verify_triangle_inequality(m)) {
            std::ostringstream msg;
            msg << "triangle inequality violated by triple (" << bad->a << ", " << bad->b << ", "
                << bad->c << ")";
            throw std::runtime_error(msg.str());
        }
    }
    return m;
}

MetricInstance load_instance_file(const std::string& path, bool validate_triangle) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    return load_instance(in, validate_triangle);
}

}  // namespace stq
