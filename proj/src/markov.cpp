#include "ehlink/markov.hpp"

#include <algorithm>

namespace ehlink {

std::vector<std::vector<int>> closed_classes(const Adjacency& graph) {
  // Iterative Tarjan.
  const int n = static_cast<int>(graph.size());
  std::vector<int> index(n, -1), low(n, 0), comp(n, -1);
  std::vector<char> on_stack(n, 0);
  std::vector<int> stack;
  std::vector<std::pair<int, std::size_t>> call;
  int counter = 0, ncomp = 0;
  for (int root = 0; root < n; ++root) {
    if (index[root] >= 0) continue;
    call.emplace_back(root, 0);
    while (!call.empty()) {
      auto& [v, next] = call.back();
      if (next == 0 && index[v] < 0) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = 1;
      }
      if (next < graph[v].size()) {
        const int w = graph[v][next++];
        if (index[w] < 0) {
          call.emplace_back(w, 0);
        } else if (on_stack[w]) {
          low[v] = std::min(low[v], index[w]);
        }
        continue;
      }
      if (low[v] == index[v]) {
        int w;
        do {
          w = stack.back();
          stack.pop_back();
          on_stack[w] = 0;
          comp[w] = ncomp;
        } while (w != v);
        ++ncomp;
      }
      const int finished = v;
      call.pop_back();
      if (!call.empty()) {
        const int parent = call.back().first;
        low[parent] = std::min(low[parent], low[finished]);
      }
    }
  }
  std::vector<char> leaves(ncomp, 0);
  for (int v = 0; v < n; ++v)
    for (int w : graph[v])
      if (comp[w] != comp[v]) leaves[comp[v]] = 1;
  std::vector<std::vector<int>> members(ncomp);
  for (int v = 0; v < n; ++v) members[comp[v]].push_back(v);
  std::vector<std::vector<int>> closed;
  for (int c = 0; c < ncomp; ++c)
    if (!leaves[c]) closed.push_back(std::move(members[c]));
  std::sort(closed.begin(), closed.end());
  return closed;
}

std::string describe_classes(const std::vector<std::vector<int>>& classes) {
  std::ostringstream os;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    if (c) os << ", ";
    os << '{';
    const auto& m = classes[c];
    for (std::size_t i = 0; i < m.size() && i < 8; ++i) os << (i ? " " : "") << m[i];
    if (m.size() > 8) os << " ... (" << m.size() << " states)";
    os << '}';
  }
  return os.str();
}

}  // namespace ehlink
