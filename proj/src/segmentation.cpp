#include "leafseg/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>

#include "leafseg/imageops.hpp"
#include "leafseg/reconstruction.hpp"

namespace leafseg {

namespace {

constexpr int DX4[] = {1, -1, 0, 0};
constexpr int DY4[] = {0, 0, 1, -1};

constexpr std::int32_t MULTI = -1;

// Basin-set compression: 0 = none, >0 = that single basin, MULTI = two or
// more distinct basins.
std::int32_t merge_state(std::int32_t a, std::int32_t b) {
    if (a == 0) return b;
    if (b == 0) return a;
    return a == b ? a : MULTI;
}

} // namespace

// Level flooding with union-find. Pixels activate in ascending relief
// order; active pixels form components that record which basins they touch
// (a seed-adjacent pixel injects its basins when it activates). A pixel is
// decided at the first level where an active 4-neighbour belongs to a
// basin-connected component: the minimax interior value of any seed-to-
// pixel path is exactly the activation level required, so the deciding
// components' basin sets are the minimisers; two or more distinct basins at
// that level make the pixel a ridge. Pixels directly adjacent to seeds
// decide before any flooding (an adjacent step has an empty path interior).
LabelMap watershed(const FloatImage& relief, const LabelMap& seeds) {
    const int w = relief.width(), h = relief.height();
    if (!relief.same_size(seeds.width(), seeds.height()))
        throw std::invalid_argument("relief/seeds dimensions differ");
    const int n = w * h;

    bool any_seed = false;
    for (auto v : seeds.labels.data())
        if (v > 0) { any_seed = true; break; }
    if (!any_seed) throw std::invalid_argument("watershed requires at least one seed");

    auto seed_at = [&](int idx) { return seeds.labels.data()[idx]; };

    LabelMap out(w, h);
    std::vector<std::uint8_t> decided(n, 0);
    auto decide = [&](int idx, std::int32_t state) {
        decided[idx] = 1;
        out.labels.data()[idx] = state == MULTI ? 0 : state;
    };

    // Basins directly adjacent to each non-seed pixel.
    std::vector<std::int32_t> adj_state(n, 0);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x) {
            int idx = y * w + x;
            if (seed_at(idx) > 0) {
                decided[idx] = 1;
                out.labels.data()[idx] = seed_at(idx);
                continue;
            }
            for (int d = 0; d < 4; ++d) {
                int nx = x + DX4[d], ny = y + DY4[d];
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                std::int32_t l = seed_at(ny * w + nx);
                if (l > 0) adj_state[idx] = merge_state(adj_state[idx], l);
            }
        }
    for (int i = 0; i < n; ++i)
        if (!decided[i] && adj_state[i] != 0) decide(i, adj_state[i]);

    // Union-find over active non-seed pixels, with per-root basin state and
    // a spliceable list of members not yet known to be basin-connected.
    std::vector<std::int32_t> parent(n, -1), rank_(n, 0), state(n, 0);
    std::vector<std::int32_t> list_head(n, -1), list_tail(n, -1), list_next(n, -1);
    std::vector<std::uint8_t> active(n, 0);

    std::vector<std::int32_t> find_stack;
    auto find = [&](std::int32_t x) {
        while (parent[x] != x) {
            find_stack.push_back(x);
            x = parent[x];
        }
        for (std::int32_t s : find_stack) parent[s] = x;
        find_stack.clear();
        return x;
    };
    auto unite = [&](std::int32_t a, std::int32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return a;
        if (rank_[a] < rank_[b]) std::swap(a, b);
        if (rank_[a] == rank_[b]) ++rank_[a];
        parent[b] = a;
        state[a] = merge_state(state[a], state[b]);
        if (list_head[b] >= 0) { // splice unfrozen members
            if (list_head[a] < 0) {
                list_head[a] = list_head[b];
                list_tail[a] = list_tail[b];
            } else {
                list_next[list_tail[a]] = list_head[b];
                list_tail[a] = list_tail[b];
            }
        }
        return a;
    };

    std::vector<std::int32_t> order;
    order.reserve(n);
    for (int i = 0; i < n; ++i)
        if (seed_at(i) == 0) order.push_back(i);
    std::sort(order.begin(), order.end(), [&](std::int32_t a, std::int32_t b) {
        double ra = relief.data()[a], rb = relief.data()[b];
        return ra != rb ? ra < rb : a < b;
    });

    std::vector<std::int32_t> candidates;
    std::vector<std::uint8_t> queued(n, 0);

    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        double level = relief.data()[order[i]];
        while (j < order.size() && relief.data()[order[j]] == level) ++j;

        // activate the whole level, then union, then inject basins
        for (std::size_t k = i; k < j; ++k) {
            std::int32_t p = order[k];
            parent[p] = p;
            state[p] = 0;
            list_head[p] = list_tail[p] = p;
            list_next[p] = -1;
            active[p] = 1;
        }
        for (std::size_t k = i; k < j; ++k) {
            std::int32_t p = order[k];
            int px = p % w, py = p / w;
            for (int d = 0; d < 4; ++d) {
                int nx = px + DX4[d], ny = py + DY4[d];
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                std::int32_t q = ny * w + nx;
                if (seed_at(q) == 0 && active[q]) unite(p, q);
            }
        }
        for (std::size_t k = i; k < j; ++k) {
            std::int32_t p = order[k];
            if (adj_state[p] != 0) {
                std::int32_t r = find(p);
                state[r] = merge_state(state[r], adj_state[p]);
            }
        }

        // components that are basin-connected now conduct: their not-yet-
        // frozen members expose undecided neighbours for decision
        candidates.clear();
        for (std::size_t k = i; k < j; ++k) {
            std::int32_t r = find(order[k]);
            if (state[r] == 0 || list_head[r] < 0) continue;
            for (std::int32_t m = list_head[r]; m >= 0; m = list_next[m]) {
                int mx = m % w, my = m / w;
                for (int d = 0; d < 4; ++d) {
                    int nx = mx + DX4[d], ny = my + DY4[d];
                    if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                    std::int32_t t = ny * w + nx;
                    if (seed_at(t) > 0 || decided[t] || queued[t]) continue;
                    queued[t] = 1;
                    candidates.push_back(t);
                }
            }
            list_head[r] = list_tail[r] = -1;
        }

        for (std::int32_t t : candidates) {
            queued[t] = 0;
            std::int32_t s = 0;
            int tx = t % w, ty = t / w;
            for (int d = 0; d < 4; ++d) {
                int nx = tx + DX4[d], ny = ty + DY4[d];
                if (nx < 0 || nx >= w || ny < 0 || ny >= h) continue;
                std::int32_t q = ny * w + nx;
                if (seed_at(q) == 0 && active[q]) s = merge_state(s, state[find(q)]);
            }
            if (s != 0) decide(t, s);
        }
        i = j;
    }

    out.region_count = seeds.region_count;
    if (out.region_count == 0) {
        std::int32_t mx = 0;
        for (auto v : seeds.labels.data()) mx = std::max(mx, v);
        out.region_count = mx;
    }
    return out;
}

namespace {

// Dinic with an adjacency-array edge list; reverse arcs are edge^1.
class Dinic {
public:
    explicit Dinic(int nodes) : head_(nodes, -1), level_(nodes), iter_(nodes) {}

    void add_edge(int from, int to, double cap) {
        edges_.push_back({to, head_[from], cap});
        head_[from] = static_cast<int>(edges_.size()) - 1;
        edges_.push_back({from, head_[to], 0.0});
        head_[to] = static_cast<int>(edges_.size()) - 1;
    }

    double run(int s, int t) {
        double total = 0;
        while (bfs(s, t)) {
            iter_ = head_;
            double f;
            while ((f = dfs(s, t, std::numeric_limits<double>::infinity())) > 0)
                total += f;
        }
        return total;
    }

    std::vector<std::uint8_t> source_side(int s) const {
        std::vector<std::uint8_t> side(head_.size(), 0);
        std::vector<int> stack{s};
        side[s] = 1;
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int e = head_[u]; e >= 0; e = edges_[e].next) {
                if (edges_[e].cap > 0 && !side[edges_[e].to]) {
                    side[edges_[e].to] = 1;
                    stack.push_back(edges_[e].to);
                }
            }
        }
        return side;
    }

private:
    struct Edge {
        int to;
        int next;
        double cap;
    };

    bool bfs(int s, int t) {
        std::fill(level_.begin(), level_.end(), -1);
        std::queue<int> q;
        level_[s] = 0;
        q.push(s);
        while (!q.empty()) {
            int u = q.front();
            q.pop();
            for (int e = head_[u]; e >= 0; e = edges_[e].next) {
                if (edges_[e].cap > 0 && level_[edges_[e].to] < 0) {
                    level_[edges_[e].to] = level_[u] + 1;
                    q.push(edges_[e].to);
                }
            }
        }
        return level_[t] >= 0;
    }

    double dfs(int u, int t, double limit) {
        if (u == t) return limit;
        for (int& e = iter_[u]; e >= 0; e = edges_[e].next) {
            Edge& ed = edges_[e];
            if (ed.cap > 0 && level_[ed.to] == level_[u] + 1) {
                double got = dfs(ed.to, t, std::min(limit, ed.cap));
                if (got > 0) {
                    ed.cap -= got;
                    edges_[e ^ 1].cap += got;
                    return got;
                }
            }
        }
        return 0;
    }

    std::vector<Edge> edges_;
    std::vector<int> head_;
    std::vector<int> level_;
    std::vector<int> iter_;
};

} // namespace

MaxFlowResult max_flow(const SeededGraph& g) {
    if (g.source == g.sink) throw std::invalid_argument("source equals sink");
    if (g.source < 0 || g.source >= g.node_count || g.sink < 0 || g.sink >= g.node_count)
        throw std::invalid_argument("terminal out of range");
    Dinic dinic(g.node_count);
    for (const auto& arc : g.arcs) {
        if (arc.capacity < 0) throw std::invalid_argument("negative capacity");
        dinic.add_edge(arc.from, arc.to, arc.capacity);
    }
    MaxFlowResult r;
    r.flow = dinic.run(g.source, g.sink);
    r.source_side = dinic.source_side(g.source);
    return r;
}

BinaryMask graph_cut_segment(const RgbImage& img, const BinaryMask& leaf,
                             const BinaryMask& bg, const GraphCutParams& params) {
    const int w = img.width(), h = img.height();
    if (!leaf.pixels().same_size(w, h) || !bg.pixels().same_size(w, h))
        throw std::invalid_argument("marker dimensions differ from image");
    if (leaf.empty() || bg.empty()) throw std::invalid_argument("empty seed set");
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            if (leaf.get(x, y) && bg.get(x, y))
                throw std::invalid_argument("overlapping seeds");

    GrayImage gray = to_grayscale(img);

    double sigma = params.sigma;
    if (sigma <= 0) {
        double sum = 0;
        std::size_t cnt = 0;
        for (int y = 0; y < h; ++y) {
            for (int x = 0; x < w; ++x) {
                if (x + 1 < w) {
                    sum += std::abs((double)gray.at(x, y) - gray.at(x + 1, y));
                    ++cnt;
                }
                if (y + 1 < h) {
                    sum += std::abs((double)gray.at(x, y) - gray.at(x, y + 1));
                    ++cnt;
                }
            }
        }
        sigma = cnt ? sum / (double)cnt : 0;
        if (sigma <= 0) sigma = 1.0;
    }
    const double inv = 1.0 / (2.0 * sigma * sigma);

    const int n = w * h;
    const int source = n, sink = n + 1;
    Dinic dinic(n + 2);

    double finite_total = 0;
    auto nlink = [&](int a, int b) {
        double d = (double)gray.data()[a] - (double)gray.data()[b];
        return params.lambda * std::exp(-d * d * inv);
    };
    std::vector<std::pair<int, int>> pairs;
    pairs.reserve(2u * n);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            int idx = y * w + x;
            if (x + 1 < w) pairs.emplace_back(idx, idx + 1);
            if (y + 1 < h) pairs.emplace_back(idx, idx + w);
        }
    }
    for (auto [a, b] : pairs) finite_total += 2 * nlink(a, b);
    const double hard = finite_total + 1.0;

    for (auto [a, b] : pairs) {
        double c = nlink(a, b);
        dinic.add_edge(a, b, c);
        dinic.add_edge(b, a, c);
    }
    for (int i = 0; i < n; ++i) {
        if (leaf.pixels().data()[i]) dinic.add_edge(source, i, hard);
        if (bg.pixels().data()[i]) dinic.add_edge(i, sink, hard);
    }

    dinic.run(source, sink);
    auto side = dinic.source_side(source);

    BinaryMask out(w, h, false, MaskRole::LeafMask);
    for (int i = 0; i < n; ++i)
        out.pixels().data()[i] = side[i] ? 255 : 0;
    return out;
}

BinaryMask watershed_segment(const RgbImage& img, const BinaryMask& leaf,
                             const BinaryMask& bg) {
    const int w = img.width(), h = img.height();
    if (!leaf.pixels().same_size(w, h) || !bg.pixels().same_size(w, h))
        throw std::invalid_argument("marker dimensions differ from image");
    if (leaf.empty() || bg.empty()) throw std::invalid_argument("empty seed set");

    LabelMap seeds(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            bool l = leaf.get(x, y), b = bg.get(x, y);
            if (l && b) throw std::invalid_argument("overlapping seeds");
            if (l) seeds.at(x, y) = 1;
            else if (b) seeds.at(x, y) = 2;
        }
    }
    seeds.region_count = 2;

    FloatImage relief = gradient_magnitude(to_grayscale(img));
    relief = impose_minima(relief, mask_union(leaf, bg));

    LabelMap basins = watershed(relief, seeds);
    BinaryMask out(w, h, false, MaskRole::LeafMask);
    for (int i = 0; i < w * h; ++i)
        out.pixels().data()[i] = basins.labels.data()[i] == 1 ? 255 : 0;
    return out;
}

BinaryMask segment(const RgbImage& img, const BinaryMask& leaf, const BinaryMask& bg,
                   SegMethod method, const GraphCutParams& params) {
    return method == SegMethod::Watershed ? watershed_segment(img, leaf, bg)
                                          : graph_cut_segment(img, leaf, bg, params);
}

} // namespace leafseg
