#include "cyclesynth/graph.hpp"

#include <algorithm>
#include <deque>
#include <limits>

namespace cyclesynth {

SccDecomposition stronglyConnectedComponents(const Adjacency& graph) {
    constexpr std::size_t kUnvisited = std::numeric_limits<std::size_t>::max();
    const std::size_t n = graph.size();

    SccDecomposition result;
    result.component.assign(n, kUnvisited);

    std::vector<std::size_t> index(n, kUnvisited), low(n, 0);
    std::vector<bool> onStack(n, false);
    std::vector<std::size_t> stack;
    std::size_t counter = 0;

    // Explicit call stack: (vertex, next edge position).
    std::vector<std::pair<std::size_t, std::size_t>> calls;

    for (std::size_t root = 0; root < n; ++root) {
        if (index[root] != kUnvisited) continue;
        calls.emplace_back(root, 0);
        index[root] = low[root] = counter++;
        stack.push_back(root);
        onStack[root] = true;

        while (!calls.empty()) {
            auto& [v, pos] = calls.back();
            if (pos < graph[v].size()) {
                std::size_t w = graph[v][pos++];
                if (index[w] == kUnvisited) {
                    index[w] = low[w] = counter++;
                    stack.push_back(w);
                    onStack[w] = true;
                    calls.emplace_back(w, 0);
                } else if (onStack[w]) {
                    low[v] = std::min(low[v], index[w]);
                }
                continue;
            }
            std::size_t finished = v;
            calls.pop_back();
            if (!calls.empty()) {
                std::size_t parent = calls.back().first;
                low[parent] = std::min(low[parent], low[finished]);
            }
            if (low[finished] == index[finished]) {
                std::vector<std::size_t> members;
                std::size_t w;
                do {
                    w = stack.back();
                    stack.pop_back();
                    onStack[w] = false;
                    result.component[w] = result.members.size();
                    members.push_back(w);
                } while (w != finished);
                std::sort(members.begin(), members.end());
                result.members.push_back(std::move(members));
            }
        }
    }
    return result;
}

std::vector<std::vector<std::size_t>> bottomComponents(const Adjacency& graph) {
    auto scc = stronglyConnectedComponents(graph);
    std::vector<bool> closed(scc.members.size(), true);
    for (std::size_t v = 0; v < graph.size(); ++v) {
        for (std::size_t w : graph[v]) {
            if (scc.component[w] != scc.component[v]) closed[scc.component[v]] = false;
        }
    }
    std::vector<std::vector<std::size_t>> bottoms;
    for (std::size_t c = 0; c < scc.members.size(); ++c) {
        if (closed[c]) bottoms.push_back(std::move(scc.members[c]));
    }
    std::sort(bottoms.begin(), bottoms.end());
    return bottoms;
}

namespace {

std::vector<bool> search(const Adjacency& graph, const StateSet& seeds) {
    std::vector<bool> seen(graph.size(), false);
    std::deque<std::size_t> queue;
    for (std::size_t s : seeds) {
        if (!seen[s]) {
            seen[s] = true;
            queue.push_back(s);
        }
    }
    while (!queue.empty()) {
        std::size_t v = queue.front();
        queue.pop_front();
        for (std::size_t w : graph[v]) {
            if (!seen[w]) {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    return seen;
}

}  // namespace

std::vector<bool> forwardReachable(const Adjacency& graph, const StateSet& sources) {
    return search(graph, sources);
}

std::vector<bool> backwardReachable(const Adjacency& graph, const StateSet& targets) {
    return search(reverseGraph(graph), targets);
}

Adjacency reverseGraph(const Adjacency& graph) {
    Adjacency reversed(graph.size());
    for (std::size_t v = 0; v < graph.size(); ++v) {
        for (std::size_t w : graph[v]) reversed[w].push_back(v);
    }
    return reversed;
}

StateSet maskToSet(const std::vector<bool>& mask) {
    StateSet set;
    for (std::size_t i = 0; i < mask.size(); ++i) {
        if (mask[i]) set.push_back(i);
    }
    return set;
}

std::vector<bool> setToMask(const StateSet& set, std::size_t n) {
    std::vector<bool> mask(n, false);
    for (std::size_t i : set) mask[i] = true;
    return mask;
}

}  // namespace cyclesynth
