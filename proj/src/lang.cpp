#include "fixpat/lang.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "fixpat/error.hpp"

namespace fixpat {

namespace {

const std::set<std::string> kModifiers = {
    "public", "private", "protected", "static",
    "final",  "abstract", "synchronized"};

// ---------------------------------------------------------------- lexing

enum class Tok { Ident, Int, Str, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  size_t begin = 0;  // byte offset
  size_t end = 0;
  int line = 1;
  int col = 1;
};

class Lexer {
 public:
  explicit Lexer(const std::string& src) : src_(src) { next(); }

  const Token& peek(int ahead = 0) {
    while (static_cast<int>(buf_.size()) <= ahead) buf_.push_back(lex());
    return buf_[ahead];
  }
  Token take() {
    Token t = peek();
    buf_.erase(buf_.begin());
    return t;
  }

 private:
  void next() {}

  [[noreturn]] void fail(const std::string& msg, int line, int col) {
    throw ParseError(msg, line, col);
  }

  Token lex() {
    skip_ws_and_comments();
    Token t;
    t.begin = pos_;
    t.line = line_;
    t.col = col_;
    if (pos_ >= src_.size()) {
      t.kind = Tok::End;
      t.end = pos_;
      return t;
    }
    char c = src_[pos_];
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '$') {
      while (pos_ < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_])) ||
              src_[pos_] == '_' || src_[pos_] == '$'))
        advance();
      t.kind = Tok::Ident;
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      while (pos_ < src_.size() &&
             std::isdigit(static_cast<unsigned char>(src_[pos_])))
        advance();
      t.kind = Tok::Int;
    } else if (c == '"') {
      advance();
      while (pos_ < src_.size() && src_[pos_] != '"') {
        if (src_[pos_] == '\\' && pos_ + 1 < src_.size()) advance();
        if (src_[pos_] == '\n') fail("unterminated string literal", t.line, t.col);
        advance();
      }
      if (pos_ >= src_.size()) fail("unterminated string literal", t.line, t.col);
      advance();  // closing quote
      t.kind = Tok::Str;
    } else {
      static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||"};
      bool matched = false;
      for (const char* op : two) {
        if (src_.compare(pos_, 2, op) == 0) {
          advance();
          advance();
          matched = true;
          break;
        }
      }
      if (!matched) {
        if (std::string("{}();,=+-*/<>!?:.@").find(c) == std::string::npos)
          fail(std::string("unexpected character '") + c + "'", line_, col_);
        advance();
      }
      t.kind = Tok::Punct;
    }
    t.end = pos_;
    t.text = src_.substr(t.begin, t.end - t.begin);
    return t;
  }

  void skip_ws_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '/') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (c == '/' && pos_ + 1 < src_.size() && src_[pos_ + 1] == '*') {
        advance();
        advance();
        while (pos_ + 1 < src_.size() &&
               !(src_[pos_] == '*' && src_[pos_ + 1] == '/'))
          advance();
        if (pos_ + 1 >= src_.size()) fail("unterminated comment", line_, col_);
        advance();
        advance();
      } else {
        break;
      }
    }
  }

  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  const std::string& src_;
  size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
  std::vector<Token> buf_;
};

// --------------------------------------------------------------- parsing

// Bookkeeping while building nodes: byte ranges per freshly created node.
struct Ranges {
  std::map<const Tree*, std::pair<size_t, size_t>> by_node;
};

class Parser {
 public:
  Parser(const std::string& src, Ranges& ranges)
      : lex_(src), ranges_(ranges) {}

  TreePtr compilation_unit() {
    std::vector<Child> items;
    size_t begin = lex_.peek().begin;
    while (lex_.peek().kind != Tok::End) items.push_back({"item", top_item()});
    size_t end = last_end_;
    int sl = items.empty() ? 1 : line_of(items.front().node);
    int el = items.empty() ? 1 : end_line_of(items.back().node);
    return finish(Tree::make("CompilationUnit", "", std::move(items),
                             Span{sl, el}),
                  items_begin(begin), end);
  }

 private:
  static int line_of(const TreePtr& t) { return t->span()->start_line; }
  static int end_line_of(const TreePtr& t) { return t->span()->end_line; }
  size_t items_begin(size_t b) { return b; }

  TreePtr finish(TreePtr t, size_t begin, size_t end) {
    ranges_.by_node[t.get()] = {begin, end};
    return t;
  }

  [[noreturn]] void fail(const std::string& msg) {
    const Token& t = lex_.peek();
    throw ParseError(msg + " (got '" + (t.kind == Tok::End ? "<eof>" : t.text) +
                         "')",
                     t.line, t.col);
  }

  bool at_punct(const std::string& p, int ahead = 0) {
    const Token& t = lex_.peek(ahead);
    return t.kind == Tok::Punct && t.text == p;
  }
  bool at_ident(const std::string& w, int ahead = 0) {
    const Token& t = lex_.peek(ahead);
    return t.kind == Tok::Ident && t.text == w;
  }
  Token expect_punct(const std::string& p) {
    if (!at_punct(p)) fail("expected '" + p + "'");
    return take();
  }
  Token expect_ident() {
    if (lex_.peek().kind != Tok::Ident) fail("expected identifier");
    return take();
  }
  Token take() {
    Token t = lex_.take();
    last_end_ = t.end;
    last_line_ = t.line;
    return t;
  }

  bool at_modifier() {
    const Token& t = lex_.peek();
    return t.kind == Tok::Ident && kModifiers.count(t.text) > 0;
  }

  TreePtr top_item() {
    int save_line = lex_.peek().line;
    (void)save_line;
    // Annotations or modifiers introduce a declaration.
    if (at_punct("@") || at_modifier() || at_ident("class"))
      return declaration();
    // Two identifiers in a row: a typed declaration (method or variable).
    if (lex_.peek().kind == Tok::Ident && lex_.peek(1).kind == Tok::Ident &&
        (at_punct("(", 2) || at_punct("=", 2) || at_punct(";", 2)))
      return declaration();
    return statement();
  }

  TreePtr declaration() {
    size_t begin = lex_.peek().begin;
    std::vector<Child> annotations;
    while (at_punct("@")) {
      Token at = take();
      Token name = expect_ident();
      annotations.push_back(
          {"annotation", finish(Tree::make("Annotation", name.text, {},
                                           Span{at.line, name.line}),
                                at.begin, name.end)});
    }
    std::vector<Child> modifiers;
    while (at_modifier()) {
      Token m = take();
      modifiers.push_back(
          {"modifier", finish(Tree::make("Modifier", m.text, {},
                                         Span{m.line, m.line}),
                              m.begin, m.end)});
    }
    if (at_ident("class")) {
      if (!annotations.empty()) fail("annotations on classes not supported");
      return class_decl(begin, std::move(modifiers));
    }
    Token type = expect_ident();
    TreePtr type_node = finish(
        Tree::make("Name", type.text, {}, Span{type.line, type.line}),
        type.begin, type.end);
    Token name = expect_ident();
    if (at_punct("("))
      return method_decl(begin, std::move(annotations), std::move(modifiers),
                         type_node, name);
    if (!annotations.empty()) fail("annotations on fields not supported");
    return var_decl_tail(begin, std::move(modifiers), type_node, name);
  }

  TreePtr class_decl(size_t begin, std::vector<Child> modifiers) {
    Token kw = take();  // class
    Token name = expect_ident();
    expect_punct("{");
    std::vector<Child> children = std::move(modifiers);
    while (!at_punct("}")) children.push_back({"member", declaration()});
    Token close = expect_punct("}");
    int sl = children.empty() || !children.front().node->span()
                 ? kw.line
                 : children.front().node->span()->start_line;
    sl = std::min(sl, kw.line);
    return finish(Tree::make("Class", name.text, std::move(children),
                             Span{sl, close.line}),
                  begin, close.end);
  }

  TreePtr method_decl(size_t begin, std::vector<Child> annotations,
                      std::vector<Child> modifiers, TreePtr type_node,
                      const Token& name) {
    expect_punct("(");
    std::vector<Child> children = std::move(annotations);
    int start_line = children.empty()
                         ? (modifiers.empty()
                                ? type_node->span()->start_line
                                : modifiers.front().node->span()->start_line)
                         : children.front().node->span()->start_line;
    for (auto& m : modifiers) children.push_back(std::move(m));
    children.push_back({"type", type_node});
    while (!at_punct(")")) {
      Token pt = expect_ident();
      TreePtr ptype = finish(
          Tree::make("Name", pt.text, {}, Span{pt.line, pt.line}), pt.begin,
          pt.end);
      Token pn = expect_ident();
      children.push_back(
          {"param", finish(Tree::make("Param", pn.text, {{"type", ptype}},
                                      Span{pt.line, pn.line}),
                           pt.begin, pn.end)});
      if (!at_punct(")")) expect_punct(",");
    }
    expect_punct(")");
    TreePtr body = block();
    size_t end = ranges_.by_node[body.get()].second;
    int end_line = body->span()->end_line;
    children.push_back({"body", body});
    return finish(Tree::make("Method", name.text, std::move(children),
                             Span{start_line, end_line}),
                  begin, end);
  }

  TreePtr var_decl_tail(size_t begin, std::vector<Child> modifiers,
                        TreePtr type_node, const Token& name) {
    std::vector<Child> children = std::move(modifiers);
    int start_line = children.empty()
                         ? type_node->span()->start_line
                         : children.front().node->span()->start_line;
    children.push_back({"type", type_node});
    TreePtr init;
    if (at_punct("=")) {
      take();
      init = expression();
      children.push_back({"init", init});
    }
    Token semi = expect_punct(";");
    return finish(Tree::make("VarDecl", name.text, std::move(children),
                             Span{start_line, semi.line}),
                  begin, semi.end);
  }

  TreePtr block() {
    Token open = expect_punct("{");
    std::vector<Child> stmts;
    while (!at_punct("}")) stmts.push_back({"stmt", statement()});
    Token close = expect_punct("}");
    return finish(Tree::make("Block", "", std::move(stmts),
                             Span{open.line, close.line}),
                  open.begin, close.end);
  }

  TreePtr statement() {
    if (at_punct("{")) return block();
    if (at_ident("if")) return if_stmt();
    if (at_ident("return")) return return_stmt();
    if (at_modifier()) {
      size_t begin = lex_.peek().begin;
      std::vector<Child> modifiers;
      while (at_modifier()) {
        Token m = take();
        modifiers.push_back(
            {"modifier", finish(Tree::make("Modifier", m.text, {},
                                           Span{m.line, m.line}),
                                m.begin, m.end)});
      }
      Token type = expect_ident();
      TreePtr type_node = finish(
          Tree::make("Name", type.text, {}, Span{type.line, type.line}),
          type.begin, type.end);
      Token name = expect_ident();
      return var_decl_tail(begin, std::move(modifiers), type_node, name);
    }
    if (lex_.peek().kind == Tok::Ident && lex_.peek(1).kind == Tok::Ident &&
        (at_punct("=", 2) || at_punct(";", 2))) {
      size_t begin = lex_.peek().begin;
      Token type = expect_ident();
      TreePtr type_node = finish(
          Tree::make("Name", type.text, {}, Span{type.line, type.line}),
          type.begin, type.end);
      Token name = expect_ident();
      return var_decl_tail(begin, {}, type_node, name);
    }
    // Expression statement or assignment.
    size_t begin = lex_.peek().begin;
    int line = lex_.peek().line;
    TreePtr e = expression();
    if (at_punct("=")) {
      take();
      TreePtr rhs = expression();
      Token semi = expect_punct(";");
      return finish(Tree::make("Assign", "",
                               {{"target", e}, {"value", rhs}},
                               Span{line, semi.line}),
                    begin, semi.end);
    }
    Token semi = expect_punct(";");
    return finish(Tree::make("ExprStmt", "", {{"expr", e}},
                             Span{line, semi.line}),
                  begin, semi.end);
  }

  TreePtr if_stmt() {
    Token kw = take();  // if
    expect_punct("(");
    TreePtr cond = expression();
    expect_punct(")");
    TreePtr then_branch = statement();
    std::vector<Child> children{{"cond", cond}, {"then", then_branch}};
    int end_line = then_branch->span()->end_line;
    size_t end = ranges_.by_node[then_branch.get()].second;
    if (at_ident("else")) {
      take();
      TreePtr else_branch = statement();
      end_line = else_branch->span()->end_line;
      end = ranges_.by_node[else_branch.get()].second;
      children.push_back({"else", else_branch});
    }
    return finish(Tree::make("If", "", std::move(children),
                             Span{kw.line, end_line}),
                  kw.begin, end);
  }

  TreePtr return_stmt() {
    Token kw = take();
    std::vector<Child> children;
    if (!at_punct(";")) children.push_back({"value", expression()});
    Token semi = expect_punct(";");
    return finish(Tree::make("Return", "", std::move(children),
                             Span{kw.line, semi.line}),
                  kw.begin, semi.end);
  }

  // ------------------------------------------------------- expressions

  TreePtr expression() { return ternary(); }

  TreePtr ternary() {
    TreePtr cond = logical_or();
    if (!at_punct("?")) return cond;
    take();
    TreePtr then_e = ternary();
    expect_punct(":");
    TreePtr else_e = ternary();
    return make_expr("Ternary", "",
                     {{"cond", cond}, {"then", then_e}, {"else", else_e}});
  }

  TreePtr binary_chain(TreePtr (Parser::*next)(),
                       const std::vector<std::string>& ops) {
    TreePtr left = (this->*next)();
    while (lex_.peek().kind == Tok::Punct &&
           std::find(ops.begin(), ops.end(), lex_.peek().text) != ops.end()) {
      Token op = take();
      TreePtr right = (this->*next)();
      left = make_expr("BinEx", op.text, {{"left", left}, {"right", right}});
    }
    return left;
  }

  TreePtr logical_or() { return binary_chain(&Parser::logical_and, {"||"}); }
  TreePtr logical_and() { return binary_chain(&Parser::equality, {"&&"}); }
  TreePtr equality() {
    return binary_chain(&Parser::relational, {"==", "!="});
  }
  TreePtr relational() {
    return binary_chain(&Parser::additive, {"<=", ">=", "<", ">"});
  }
  TreePtr additive() {
    return binary_chain(&Parser::multiplicative, {"+", "-"});
  }
  TreePtr multiplicative() {
    return binary_chain(&Parser::unary, {"*", "/"});
  }

  bool at_cast() {
    // "(" Ident ")" followed by the start of an operand.
    if (!at_punct("(") || lex_.peek(1).kind != Tok::Ident || !at_punct(")", 2))
      return false;
    const Token& t = lex_.peek(3);
    return t.kind == Tok::Ident || t.kind == Tok::Int || t.kind == Tok::Str ||
           (t.kind == Tok::Punct && (t.text == "(" || t.text == "!"));
  }

  TreePtr unary() {
    if (at_punct("!")) {
      Token op = take();
      TreePtr operand = unary();
      return make_expr("UnEx", "!", {{"operand", operand}});
    }
    if (at_cast()) {
      take();  // (
      Token type = take();
      take();  // )
      TreePtr operand = unary();
      return make_expr("UnEx", "(" + type.text + ")", {{"operand", operand}});
    }
    return postfix();
  }

  TreePtr postfix() {
    TreePtr e = primary();
    while (at_punct(".")) {
      take();
      Token name = expect_ident();
      TreePtr name_node = finish(
          Tree::make("Name", name.text, {}, Span{name.line, name.line}),
          name.begin, name.end);
      if (at_punct("(")) {
        std::vector<Child> children{{"recv", e}, {"name", name_node}};
        parse_args(children);
        e = make_expr("Call", "", std::move(children));
      } else {
        e = make_expr("FieldAccess", "",
                      {{"recv", e}, {"name", name_node}});
      }
    }
    return e;
  }

  void parse_args(std::vector<Child>& children) {
    expect_punct("(");
    while (!at_punct(")")) {
      children.push_back({"arg", expression()});
      if (!at_punct(")")) expect_punct(",");
    }
    take();  // )
  }

  TreePtr primary() {
    const Token& t = lex_.peek();
    if (t.kind == Tok::Int || t.kind == Tok::Str) {
      Token lit = take();
      return finish(Tree::make("Literal", lit.text, {},
                               Span{lit.line, lit.line}),
                    lit.begin, lit.end);
    }
    if (t.kind == Tok::Ident) {
      if (t.text == "true" || t.text == "false" || t.text == "null") {
        Token lit = take();
        return finish(Tree::make("Literal", lit.text, {},
                                 Span{lit.line, lit.line}),
                      lit.begin, lit.end);
      }
      Token name = take();
      TreePtr name_node = finish(
          Tree::make("Name", name.text, {}, Span{name.line, name.line}),
          name.begin, name.end);
      if (at_punct("(")) {
        std::vector<Child> children{{"name", name_node}};
        parse_args(children);
        return make_expr("Call", "", std::move(children));
      }
      return name_node;
    }
    if (at_punct("(")) {
      take();
      TreePtr e = expression();
      expect_punct(")");
      return e;
    }
    fail("expected expression");
  }

  // Builds an expression node whose span and byte range cover its children
  // plus any operator tokens consumed up to the current position.
  TreePtr make_expr(const std::string& label, const std::string& value,
                    std::vector<Child> children) {
    size_t begin = ranges_.by_node[children.front().node.get()].first;
    size_t end = last_end_;
    int sl = children.front().node->span()->start_line;
    int el = last_line_;
    for (const auto& c : children) {
      sl = std::min(sl, c.node->span()->start_line);
      el = std::max(el, c.node->span()->end_line);
    }
    return finish(
        Tree::make(label, value, std::move(children), Span{sl, el}), begin,
        end);
  }

  Lexer lex_;
  Ranges& ranges_;
  size_t last_end_ = 0;
  int last_line_ = 1;
};

void build_offsets(const TreePtr& t, std::vector<int>& path,
                   const Ranges& ranges,
                   std::map<std::vector<int>, std::pair<size_t, size_t>>& out) {
  auto it = ranges.by_node.find(t.get());
  if (it != ranges.by_node.end()) out[path] = it->second;
  for (size_t i = 0; i < t->children().size(); ++i) {
    path.push_back(static_cast<int>(i));
    build_offsets(t->children()[i].node, path, ranges, out);
    path.pop_back();
  }
}

// -------------------------------------------------------------- printing

constexpr int kIndentWidth = 4;

int expr_precedence(const TreePtr& t) {
  const std::string& l = t->label();
  if (l == "Ternary") return 1;
  if (l == "BinEx") {
    const std::string& op = t->value();
    if (op == "||") return 2;
    if (op == "&&") return 3;
    if (op == "==" || op == "!=") return 4;
    if (op == "<" || op == ">" || op == "<=" || op == ">=") return 5;
    if (op == "+" || op == "-") return 6;
    if (op == "*" || op == "/") return 7;
    throw RenderError("unknown binary operator: " + op);
  }
  if (l == "UnEx") return 8;
  return 9;  // Call, FieldAccess, Name, Literal
}

const TreePtr& child_at(const TreePtr& t, const std::string& loc) {
  for (const auto& c : t->children())
    if (c.location == loc) return c.node;
  throw RenderError("node " + t->label() + " missing child '" + loc + "'");
}

const TreePtr* child_opt(const TreePtr& t, const std::string& loc) {
  for (const auto& c : t->children())
    if (c.location == loc) return &c.node;
  return nullptr;
}

void print_expr(const TreePtr& t, int parent_prec, std::string& out);

void print_operand(const TreePtr& t, int needed, std::string& out) {
  if (t->is_hole()) throw RenderError("cannot render a pattern hole");
  bool parens = expr_precedence(t) < needed;
  if (parens) out += "(";
  print_expr(t, 0, out);
  if (parens) out += ")";
}

void print_expr(const TreePtr& t, int, std::string& out) {
  if (t->is_hole()) throw RenderError("cannot render a pattern hole");
  const std::string& l = t->label();
  if (l == "Name" || l == "Literal") {
    out += t->value();
  } else if (l == "BinEx") {
    int prec = expr_precedence(t);
    print_operand(child_at(t, "left"), prec, out);
    out += " " + t->value() + " ";
    print_operand(child_at(t, "right"), prec + 1, out);
  } else if (l == "UnEx") {
    if (t->value() == "!") {
      out += "!";
      print_operand(child_at(t, "operand"), 8, out);
    } else {
      out += t->value() + " ";
      print_operand(child_at(t, "operand"), 8, out);
    }
  } else if (l == "Ternary") {
    print_operand(child_at(t, "cond"), 2, out);
    out += " ? ";
    print_operand(child_at(t, "then"), 1, out);
    out += " : ";
    print_operand(child_at(t, "else"), 1, out);
  } else if (l == "Call") {
    if (const TreePtr* recv = child_opt(t, "recv")) {
      print_operand(*recv, 9, out);
      out += ".";
    }
    out += child_at(t, "name")->value();
    out += "(";
    bool first = true;
    for (const auto& c : t->children()) {
      if (c.location != "arg") continue;
      if (!first) out += ", ";
      first = false;
      print_operand(c.node, 1, out);
    }
    out += ")";
  } else if (l == "FieldAccess") {
    print_operand(child_at(t, "recv"), 9, out);
    out += "." + child_at(t, "name")->value();
  } else {
    throw RenderError("unknown expression label: " + l);
  }
}

std::string expr_text(const TreePtr& t) {
  std::string out;
  print_expr(t, 0, out);
  return out;
}

void print_stmt(const TreePtr& t, int indent, std::vector<std::string>& out);

void print_block_body(const TreePtr& block, int indent,
                      std::vector<std::string>& out) {
  for (const auto& c : block->children()) print_stmt(c.node, indent, out);
}

std::string pad(int indent) { return std::string(indent, ' '); }

void print_if(const TreePtr& t, int indent, std::vector<std::string>& out,
              const std::string& lead) {
  std::string header = lead + "if (" + expr_text(child_at(t, "cond")) + ")";
  const TreePtr& then_branch = child_at(t, "then");
  const TreePtr* else_branch = child_opt(t, "else");
  bool then_block = !then_branch->is_hole() && then_branch->label() == "Block";
  if (then_block) {
    out.push_back(pad(indent) + header + " {");
    print_block_body(then_branch, indent + kIndentWidth, out);
    if (!else_branch) {
      out.push_back(pad(indent) + "}");
      return;
    }
    if (!(*else_branch)->is_hole() && (*else_branch)->label() == "If") {
      // else-if chain continues on the closing brace line
      std::vector<std::string> tail;
      print_if(*else_branch, indent, tail, "} else ");
      // print_if emitted the header with indent already; splice
      for (auto& line : tail) out.push_back(line);
      return;
    }
    if (!(*else_branch)->is_hole() && (*else_branch)->label() == "Block") {
      out.push_back(pad(indent) + "} else {");
      print_block_body(*else_branch, indent + kIndentWidth, out);
      out.push_back(pad(indent) + "}");
      return;
    }
    out.push_back(pad(indent) + "} else");
    print_stmt(*else_branch, indent + kIndentWidth, out);
    return;
  }
  out.push_back(pad(indent) + header);
  print_stmt(then_branch, indent + kIndentWidth, out);
  if (!else_branch) return;
  if (!(*else_branch)->is_hole() && (*else_branch)->label() == "If") {
    print_if(*else_branch, indent, out, "else ");
    return;
  }
  if (!(*else_branch)->is_hole() && (*else_branch)->label() == "Block") {
    out.push_back(pad(indent) + "else {");
    print_block_body(*else_branch, indent + kIndentWidth, out);
    out.push_back(pad(indent) + "}");
    return;
  }
  out.push_back(pad(indent) + "else");
  print_stmt(*else_branch, indent + kIndentWidth, out);
}

std::string decl_modifiers(const TreePtr& t) {
  std::string s;
  for (const auto& c : t->children())
    if (c.location == "modifier") s += c.node->value() + " ";
  return s;
}

void print_method(const TreePtr& t, int indent, std::vector<std::string>& out) {
  for (const auto& c : t->children())
    if (c.location == "annotation")
      out.push_back(pad(indent) + "@" + c.node->value());
  std::string header = pad(indent) + decl_modifiers(t) +
                       child_at(t, "type")->value() + " " + t->value() + "(";
  bool first = true;
  for (const auto& c : t->children()) {
    if (c.location != "param") continue;
    if (!first) header += ", ";
    first = false;
    header += child_at(c.node, "type")->value() + " " + c.node->value();
  }
  header += ") {";
  out.push_back(header);
  print_block_body(child_at(t, "body"), indent + kIndentWidth, out);
  out.push_back(pad(indent) + "}");
}

void print_class(const TreePtr& t, int indent, std::vector<std::string>& out) {
  out.push_back(pad(indent) + decl_modifiers(t) + "class " + t->value() +
                " {");
  for (const auto& c : t->children()) {
    if (c.location != "member") continue;
    if (c.node->label() == "Method")
      print_method(c.node, indent + kIndentWidth, out);
    else
      print_stmt(c.node, indent + kIndentWidth, out);
  }
  out.push_back(pad(indent) + "}");
}

void print_stmt(const TreePtr& t, int indent, std::vector<std::string>& out) {
  if (t->is_hole()) throw RenderError("cannot render a pattern hole");
  const std::string& l = t->label();
  if (l == "Block") {
    out.push_back(pad(indent) + "{");
    print_block_body(t, indent + kIndentWidth, out);
    out.push_back(pad(indent) + "}");
  } else if (l == "If") {
    print_if(t, indent, out, "");
  } else if (l == "Return") {
    if (const TreePtr* v = child_opt(t, "value"))
      out.push_back(pad(indent) + "return " + expr_text(*v) + ";");
    else
      out.push_back(pad(indent) + "return;");
  } else if (l == "VarDecl") {
    std::string line = pad(indent) + decl_modifiers(t) +
                       child_at(t, "type")->value() + " " + t->value();
    if (const TreePtr* init = child_opt(t, "init"))
      line += " = " + expr_text(*init);
    out.push_back(line + ";");
  } else if (l == "Assign") {
    out.push_back(pad(indent) + expr_text(child_at(t, "target")) + " = " +
                  expr_text(child_at(t, "value")) + ";");
  } else if (l == "ExprStmt") {
    out.push_back(pad(indent) + expr_text(child_at(t, "expr")) + ";");
  } else if (l == "Method") {
    print_method(t, indent, out);
  } else if (l == "Class") {
    print_class(t, indent, out);
  } else {
    // expression in statement position is a rendering error
    throw RenderError("unknown statement label: " + l);
  }
}

bool is_statement_label(const std::string& l) {
  return l == "Block" || l == "If" || l == "Return" || l == "VarDecl" ||
         l == "Assign" || l == "ExprStmt" || l == "Method" || l == "Class";
}

std::string join_lines(const std::vector<std::string>& lines) {
  std::string out;
  for (size_t i = 0; i < lines.size(); ++i) {
    out += lines[i];
    if (i + 1 < lines.size()) out += "\n";
  }
  return out;
}

}  // namespace

SourceFile parse_source_file(std::string path, std::string text) {
  Ranges ranges;
  Parser p(text, ranges);
  TreePtr tree = p.compilation_unit();
  SourceFile f;
  f.path = std::move(path);
  f.text = std::move(text);
  f.tree = tree;
  std::vector<int> pathbuf;
  build_offsets(tree, pathbuf, ranges, f.offsets);
  return f;
}

TreePtr parse_source(const std::string& text) {
  return parse_source_file("<string>", text).tree;
}

std::string print_tree(const TreePtr& t) {
  if (t->is_hole()) throw RenderError("cannot render a pattern hole");
  const std::string& l = t->label();
  if (l == "CompilationUnit") {
    std::vector<std::string> lines;
    for (const auto& c : t->children()) print_stmt(c.node, 0, lines);
    if (lines.empty()) return "";
    return join_lines(lines) + "\n";
  }
  if (is_statement_label(l)) {
    std::vector<std::string> lines;
    print_stmt(t, 0, lines);
    return join_lines(lines);
  }
  if (l == "Annotation") return "@" + t->value();
  if (l == "Modifier") return t->value();
  if (l == "Param")
    return child_at(t, "type")->value() + " " + t->value();
  return expr_text(t);
}

namespace {

size_t line_start_before(const std::string& text, size_t pos) {
  size_t p = pos;
  while (p > 0 && text[p - 1] != '\n') --p;
  return p;
}

std::string leading_ws(const std::string& text, size_t line_start) {
  size_t p = line_start;
  while (p < text.size() && (text[p] == ' ' || text[p] == '\t')) ++p;
  return text.substr(line_start, p - line_start);
}

// Renders a forest as text whose continuation lines carry `indent`.
std::string render_forest(const std::vector<TreePtr>& forest,
                          const std::string& indent) {
  std::string out;
  for (size_t i = 0; i < forest.size(); ++i) {
    std::string piece = print_tree(forest[i]);
    if (i) out += "\n" + indent;
    std::string shifted;
    for (char c : piece) {
      shifted += c;
      if (c == '\n') shifted += indent;
    }
    out += shifted;
  }
  return out;
}

std::pair<size_t, size_t> lookup_range(const SourceFile& file,
                                       const TreeRef& ref) {
  auto it = file.offsets.find(ref.path);
  if (it == file.offsets.end())
    throw RenderError("splice site has no recorded source range");
  return it->second;
}

}  // namespace

std::string splice_patch(const SourceFile& file, const TreeRef& site,
                         const std::vector<TreePtr>& forest) {
  TreePtr node = resolve(file.tree, site);
  if (!node->span()) throw RenderError("splice site has no span");
  if (site.path.empty()) {
    if (forest.size() != 1)
      throw RenderError("root splice requires a single replacement tree");
    return print_tree(forest[0]);
  }
  auto [begin, end] = lookup_range(file, site);
  std::string indent = leading_ws(file.text, line_start_before(file.text, begin));
  return file.text.substr(0, begin) + render_forest(forest, indent) +
         file.text.substr(end);
}

std::string splice_range(const SourceFile& file, const TreeRef& ref, int begin,
                         int end, const std::vector<TreePtr>& forest) {
  TreePtr node = resolve(file.tree, ref);
  int n = static_cast<int>(node->children().size());
  if (begin < 0 || end < begin || end > n)
    throw RenderError("splice range out of bounds");
  if (begin == end) {
    // Insertion at a child boundary: splice whole lines before the anchor.
    size_t anchor;
    std::string indent;
    if (begin < n) {
      TreeRef child = ref;
      child.path.push_back(begin);
      anchor = line_start_before(file.text, lookup_range(file, child).first);
      indent = leading_ws(file.text, anchor);
    } else if (n > 0) {
      TreeRef child = ref;
      child.path.push_back(n - 1);
      auto [cb, ce] = lookup_range(file, child);
      // start of the line after the last child
      size_t p = ce;
      while (p < file.text.size() && file.text[p] != '\n') ++p;
      anchor = p < file.text.size() ? p + 1 : p;
      indent = leading_ws(file.text, line_start_before(file.text, cb));
    } else {
      auto [bb, be] = lookup_range(file, ref);
      // empty block: insert before its closing line, one level deeper
      anchor = line_start_before(file.text, be > 0 ? be - 1 : be);
      indent = leading_ws(file.text, line_start_before(file.text, bb)) +
               std::string(kIndentWidth, ' ');
    }
    if (forest.empty()) return file.text;
    std::string body = indent + render_forest(forest, indent) + "\n";
    std::string out = file.text;
    out.insert(anchor, body);
    return out;
  }
  TreeRef first = ref, last = ref;
  first.path.push_back(begin);
  last.path.push_back(end - 1);
  size_t from = lookup_range(file, first).first;
  size_t to = lookup_range(file, last).second;
  std::string indent =
      leading_ws(file.text, line_start_before(file.text, from));
  if (forest.empty()) {
    // Deletion: remove the covered lines entirely.
    size_t ls = line_start_before(file.text, from);
    size_t le = to;
    while (le < file.text.size() && file.text[le] != '\n') ++le;
    if (le < file.text.size()) ++le;
    return file.text.substr(0, ls) + file.text.substr(le);
  }
  return file.text.substr(0, from) + render_forest(forest, indent) +
         file.text.substr(to);
}

}  // namespace fixpat
