#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lafusion/vocab.hpp"

namespace lafusion {

using NodeId = std::int32_t;
inline constexpr NodeId kNoNode = -1;

struct TrieNode {
  // Children occupy edges_[first_edge, first_edge + edge_count), sorted by character.
  std::int32_t first_edge = 0;
  std::int32_t edge_count = 0;
  WordId word_id = -1;  // >= 0 iff the path spells a vocabulary word
  WordId min_id = 0;
  WordId max_id = -1;

  bool is_word_end() const { return word_id >= 0; }
};

// Prefix tree over the spelled words of a vocabulary. Because word ids follow
// spelling order, the words below any node form the id interval
// [min_id, max_id]. <UNK> and <eos> have no spelling and are not members.
class PrefixTree {
 public:
  explicit PrefixTree(const Vocabulary& vocab);

  NodeId root() const { return 0; }
  std::size_t node_count() const { return nodes_.size(); }
  const TrieNode& node(NodeId id) const { return nodes_[static_cast<std::size_t>(id)]; }

  // Child of `from` along `c`, or kNoNode. kNoNode is absorbing.
  NodeId descend(NodeId from, char c) const;
  NodeId find(std::string_view prefix) const;

  std::pair<WordId, WordId> anticipated_interval(NodeId id) const {
    const TrieNode& n = node(id);
    return {n.min_id, n.max_id};
  }

  // Characters leading out of `id`, ascending.
  std::string child_chars(NodeId id) const;
  NodeId child_at(NodeId id, std::size_t k) const;

  // "path TAB min_id TAB max_id TAB word_id|-" per node, depth-first.
  void dump(std::ostream& out) const;

 private:
  struct Edge {
    char c;
    NodeId target;
  };

  void dump_node(std::ostream& out, NodeId id, std::string& path) const;

  std::vector<TrieNode> nodes_;
  std::vector<Edge> edges_;
};

}  // namespace lafusion
