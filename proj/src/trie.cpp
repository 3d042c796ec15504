#include "lafusion/trie.hpp"

#include "lafusion/error.hpp"

namespace lafusion {

namespace {

struct Builder {
  const std::vector<std::string>& words;
  std::vector<TrieNode>& nodes;
  std::vector<std::pair<char, NodeId>>& edges;

  // Words [lo, hi) all share the first `depth` characters.
  NodeId build(std::size_t lo, std::size_t hi, std::size_t depth) {
    const auto id = static_cast<NodeId>(nodes.size());
    nodes.emplace_back();
    nodes[id].min_id = static_cast<WordId>(lo);
    nodes[id].max_id = static_cast<WordId>(hi) - 1;

    std::size_t begin = lo;
    if (words[begin].size() == depth) {
      nodes[id].word_id = static_cast<WordId>(begin);
      ++begin;
    }

    std::vector<std::pair<std::size_t, std::size_t>> groups;
    for (std::size_t i = begin; i < hi;) {
      std::size_t j = i + 1;
      while (j < hi && words[j][depth] == words[i][depth]) ++j;
      groups.emplace_back(i, j);
      i = j;
    }

    const auto first = static_cast<std::int32_t>(edges.size());
    nodes[id].first_edge = first;
    nodes[id].edge_count = static_cast<std::int32_t>(groups.size());
    edges.resize(edges.size() + groups.size());
    for (std::size_t k = 0; k < groups.size(); ++k) {
      const auto [a, b] = groups[k];
      const NodeId child = build(a, b, depth + 1);
      edges[static_cast<std::size_t>(first) + k] = {words[a][depth], child};
    }
    return id;
  }
};

}  // namespace

PrefixTree::PrefixTree(const Vocabulary& vocab) {
  const auto& words = vocab.words();
  if (words.empty()) throw DataError("cannot build a prefix tree from an empty vocabulary");
  std::vector<std::pair<char, NodeId>> edges;
  Builder{words, nodes_, edges}.build(0, words.size(), 0);
  edges_.reserve(edges.size());
  for (auto [c, target] : edges) edges_.push_back({c, target});
}

NodeId PrefixTree::descend(NodeId from, char c) const {
  if (from == kNoNode) return kNoNode;
  const TrieNode& n = node(from);
  const Edge* e = edges_.data() + n.first_edge;
  for (std::int32_t k = 0; k < n.edge_count; ++k)
    if (e[k].c == c) return e[k].target;
  return kNoNode;
}

NodeId PrefixTree::find(std::string_view prefix) const {
  NodeId n = root();
  for (char c : prefix) n = descend(n, c);
  return n;
}

std::string PrefixTree::child_chars(NodeId id) const {
  const TrieNode& n = node(id);
  std::string out;
  for (std::int32_t k = 0; k < n.edge_count; ++k)
    out.push_back(edges_[static_cast<std::size_t>(n.first_edge + k)].c);
  return out;
}

NodeId PrefixTree::child_at(NodeId id, std::size_t k) const {
  const TrieNode& n = node(id);
  return edges_.at(static_cast<std::size_t>(n.first_edge) + k).target;
}

void PrefixTree::dump(std::ostream& out) const {
  std::string path;
  dump_node(out, root(), path);
}

void PrefixTree::dump_node(std::ostream& out, NodeId id, std::string& path) const {
  const TrieNode& n = node(id);
  out << path << '\t' << n.min_id << '\t' << n.max_id << '\t';
  if (n.is_word_end())
    out << n.word_id;
  else
    out << '-';
  out << '\n';
  for (std::int32_t k = 0; k < n.edge_count; ++k) {
    const Edge& e = edges_[static_cast<std::size_t>(n.first_edge + k)];
    path.push_back(e.c);
    dump_node(out, e.target, path);
    path.pop_back();
  }
}

}  // namespace lafusion
