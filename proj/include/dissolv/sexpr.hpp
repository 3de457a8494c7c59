#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace dissolv::sexpr {

enum class Kind { List, Symbol, String, Number };

/// One node of a parsed S-expression document. Atoms keep their raw token
/// text; numbers additionally carry the decoded value.
struct Node {
  Kind kind = Kind::List;
  std::vector<Node> children;
  std::string text;
  double numeric_value = 0.0;
  int source_line = 1;

  bool is_list() const { return kind == Kind::List; }
  bool is_atom() const { return kind != Kind::List; }

  /// Keyword of a list form, i.e. the text of its first child when that
  /// child is a Symbol. Empty for atoms and anonymous lists.
  std::string_view keyword() const;

  /// Atom text at child index `i` (Symbol, String or Number), if present.
  std::optional<std::string_view> atom(std::size_t i) const;
  /// Numeric value of child `i` when it is a Number.
  std::optional<double> number(std::size_t i) const;

  /// First direct child list with the given keyword, or nullptr.
  const Node* child(std::string_view keyword) const;

  friend bool operator==(const Node& a, const Node& b);
};

/// Maximum list nesting accepted by parse(); deeper input is rejected
/// as MalformedForm.
inline constexpr int kMaxDepth = 4096;

/// Parses a whole document. The document must consist of exactly one
/// top-level list. Throws dissolv::Error on malformed input.
Node parse(std::string_view text);

/// All direct children of `node` that are lists headed by `keyword`, in
/// document order. Throws NotAList when `node` is an atom.
std::vector<const Node*> find_children(const Node& node, std::string_view keyword);

/// Canonical number text: shortest representation that round-trips.
std::string format_number(double value);

/// Canonical serialization: single spaces between elements, no newlines,
/// strings re-escaped. parse(to_text(n)) is structurally equal to n.
std::string to_text(const Node& node);

}  // namespace dissolv::sexpr
