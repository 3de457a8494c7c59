#include "dissolv/sexpr.hpp"

#include <charconv>
#include <cmath>

#include "dissolv/error.hpp"

namespace dissolv::sexpr {

std::string_view Node::keyword() const {
  if (kind != Kind::List || children.empty() || children.front().kind != Kind::Symbol) return {};
  return children.front().text;
}

std::optional<std::string_view> Node::atom(std::size_t i) const {
  if (i >= children.size() || children[i].is_list()) return std::nullopt;
  return std::string_view(children[i].text);
}

std::optional<double> Node::number(std::size_t i) const {
  if (i >= children.size() || children[i].kind != Kind::Number) return std::nullopt;
  return children[i].numeric_value;
}

const Node* Node::child(std::string_view kw) const {
  for (const auto& c : children)
    if (c.keyword() == kw) return &c;
  return nullptr;
}

bool operator==(const Node& a, const Node& b) {
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case Kind::Number: return a.numeric_value == b.numeric_value;
    case Kind::Symbol:
    case Kind::String: return a.text == b.text;
    case Kind::List: return a.children == b.children;
  }
  return false;
}

namespace {

bool is_space(char c) { return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v'; }
bool is_delim(char c) { return is_space(c) || c == '(' || c == ')' || c == '"'; }
bool is_digit(char c) { return c >= '0' && c <= '9'; }

// [+-]? (D+ (. D*)? | . D+) ([eE] [+-]? D+)?
bool looks_numeric(std::string_view t) {
  std::size_t i = 0, n = t.size();
  if (i < n && (t[i] == '+' || t[i] == '-')) ++i;
  std::size_t int_digits = 0, frac_digits = 0;
  while (i < n && is_digit(t[i])) ++i, ++int_digits;
  if (i < n && t[i] == '.') {
    ++i;
    while (i < n && is_digit(t[i])) ++i, ++frac_digits;
  }
  if (int_digits + frac_digits == 0) return false;
  if (i < n && (t[i] == 'e' || t[i] == 'E')) {
    ++i;
    if (i < n && (t[i] == '+' || t[i] == '-')) ++i;
    std::size_t exp_digits = 0;
    while (i < n && is_digit(t[i])) ++i, ++exp_digits;
    if (exp_digits == 0) return false;
  }
  return i == n;
}

Node make_atom(std::string_view token, int line) {
  Node node;
  node.text = std::string(token);
  node.source_line = line;
  if (looks_numeric(token)) {
    std::string_view digits = token.front() == '+' ? token.substr(1) : token;
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), value);
    if (ec == std::errc() && ptr == digits.data() + digits.size() && std::isfinite(value)) {
      node.kind = Kind::Number;
      node.numeric_value = value;
      return node;
    }
  }
  node.kind = Kind::Symbol;
  return node;
}

}  // namespace

Node parse(std::string_view text) {
  std::vector<Node> stack;  // open lists
  std::optional<Node> root;
  int line = 1;
  std::size_t i = 0;
  const std::size_t n = text.size();

  auto attach = [&](Node&& node) {
    if (stack.empty()) {
      if (root || node.is_atom())
        throw Error(ErrorCode::MalformedForm, "content outside the root form", node.source_line);
      root = std::move(node);
    } else {
      stack.back().children.push_back(std::move(node));
    }
  };

  while (i < n) {
    char c = text[i];
    if (c == '\n') {
      ++line;
      ++i;
    } else if (is_space(c)) {
      ++i;
    } else if (c == '(') {
      if (static_cast<int>(stack.size()) >= kMaxDepth)
        throw Error(ErrorCode::MalformedForm, "nesting too deep", line);
      if (root) throw Error(ErrorCode::MalformedForm, "content outside the root form", line);
      Node list;
      list.kind = Kind::List;
      list.source_line = line;
      stack.push_back(std::move(list));
      ++i;
    } else if (c == ')') {
      if (stack.empty()) throw Error(ErrorCode::UnbalancedParen, "unexpected ')'", line);
      Node done = std::move(stack.back());
      stack.pop_back();
      attach(std::move(done));
      ++i;
    } else if (c == '"') {
      const int start_line = line;
      std::string value;
      ++i;
      bool closed = false;
      while (i < n) {
        char s = text[i];
        if (s == '"') {
          closed = true;
          ++i;
          break;
        }
        if (s == '\\' && i + 1 < n) {
          char e = text[i + 1];
          switch (e) {
            case 'n': value.push_back('\n'); break;
            case 't': value.push_back('\t'); break;
            case 'r': value.push_back('\r'); break;
            default: value.push_back(e); break;
          }
          if (e == '\n') ++line;
          i += 2;
          continue;
        }
        if (s == '\n') ++line;
        value.push_back(s);
        ++i;
      }
      if (!closed) throw Error(ErrorCode::UnterminatedString, "string not closed", start_line);
      Node atom;
      atom.kind = Kind::String;
      atom.text = std::move(value);
      atom.source_line = start_line;
      attach(std::move(atom));
    } else {
      std::size_t j = i;
      while (j < n && !is_delim(text[j])) ++j;
      attach(make_atom(text.substr(i, j - i), line));
      i = j;
    }
  }

  if (!stack.empty())
    throw Error(ErrorCode::UnbalancedParen, "unclosed '('", stack.back().source_line);
  if (!root) throw Error(ErrorCode::EmptyDocument, "no forms in document");
  return std::move(*root);
}

std::vector<const Node*> find_children(const Node& node, std::string_view keyword) {
  if (!node.is_list())
    throw Error(ErrorCode::NotAList, "find_children('" + std::string(keyword) + "') on an atom", node.source_line);
  std::vector<const Node*> out;
  for (const auto& c : node.children)
    if (c.keyword() == keyword) out.push_back(&c);
  return out;
}

std::string format_number(double value) {
  if (value == 0.0) value = 0.0;  // drop the sign of -0
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  (void)ec;
  return std::string(buf, ptr);
}

namespace {

void quote(std::string& out, std::string_view s) {
  out.push_back('"');
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default: out.push_back(c);
    }
  }
  out.push_back('"');
}

void emit(std::string& out, const Node& node) {
  switch (node.kind) {
    case Kind::Number: out += format_number(node.numeric_value); break;
    case Kind::Symbol: out += node.text; break;
    case Kind::String: quote(out, node.text); break;
    case Kind::List:
      out.push_back('(');
      for (std::size_t i = 0; i < node.children.size(); ++i) {
        if (i) out.push_back(' ');
        emit(out, node.children[i]);
      }
      out.push_back(')');
      break;
  }
}

}  // namespace

std::string to_text(const Node& node) {
  std::string out;
  emit(out, node);
  return out;
}

}  // namespace dissolv::sexpr
