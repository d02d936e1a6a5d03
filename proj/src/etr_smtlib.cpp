#include <cctype>
#include <sstream>

#include "cmpg/error.hpp"
#include "cmpg/etr.hpp"

namespace cmpg {

namespace {

std::string symbol(const std::string& name) { return "|" + name + "|"; }

std::string numeral(const Rational& c) {
  const Rational a = c.abs();
  std::string body = a.denominator() == 1 ? a.numerator().get_str()
                                          : "(/ " + a.numerator().get_str() + " " + a.denominator().get_str() + ")";
  return c.sign() < 0 ? "(- " + body + ")" : body;
}

std::string term(const EtrSentence& s, const Polynomial::Monomial& m, const Rational& c) {
  if (m.empty()) return numeral(c);
  std::vector<std::string> factors;
  if (c != Rational(1)) factors.push_back(numeral(c));
  for (std::size_t v : m) factors.push_back(symbol(s.variables.at(v)));
  if (factors.size() == 1) return factors.front();
  std::string out = "(*";
  for (const auto& f : factors) out += " " + f;
  return out + ")";
}

std::string expression(const EtrSentence& s, const Polynomial& p) {
  if (p.is_zero()) return "0";
  std::vector<std::string> terms;
  for (const auto& [m, c] : p.terms()) terms.push_back(term(s, m, c));
  if (terms.size() == 1) return terms.front();
  std::string out = "(+";
  for (const auto& t : terms) out += " " + t;
  return out + ")";
}

const char* relation_symbol(Relation r) {
  switch (r) {
    case Relation::Le:
      return "<=";
    case Relation::Ge:
      return ">=";
    case Relation::Eq:
      break;
  }
  return "=";
}

// --- reading ----------------------------------------------------------------

struct Token {
  enum Kind { Open, Close, Symbol, Quoted } kind;
  std::string text;
};

std::vector<Token> tokenize(std::string_view text, std::size_t line) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < text.size()) {
    const char ch = text[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      ++i;
    } else if (ch == '(') {
      out.push_back({Token::Open, "("});
      ++i;
    } else if (ch == ')') {
      out.push_back({Token::Close, ")"});
      ++i;
    } else if (ch == '|') {
      const std::size_t end = text.find('|', i + 1);
      if (end == std::string_view::npos) throw ParseError("unterminated quoted symbol at line " + std::to_string(line));
      out.push_back({Token::Quoted, std::string(text.substr(i + 1, end - i - 1))});
      i = end + 1;
    } else if (ch == ';') {
      break;
    } else {
      std::size_t end = i;
      while (end < text.size() && !std::isspace(static_cast<unsigned char>(text[end])) && text[end] != '(' &&
             text[end] != ')' && text[end] != ';') {
        ++end;
      }
      out.push_back({Token::Symbol, std::string(text.substr(i, end - i))});
      i = end;
    }
  }
  return out;
}

struct SExpr {
  bool atom = true;
  bool quoted = false;
  std::string text;
  std::vector<SExpr> items;
};

class Reader {
 public:
  Reader(std::vector<Token> tokens) : tokens_(std::move(tokens)) {}
  bool done() const { return pos_ >= tokens_.size(); }

  SExpr read() {
    if (done()) throw ParseError("unexpected end of SMT-LIB input");
    const Token& t = tokens_[pos_++];
    if (t.kind == Token::Close) throw ParseError("unbalanced ')' in SMT-LIB input");
    if (t.kind != Token::Open) return SExpr{true, t.kind == Token::Quoted, t.text, {}};
    SExpr list{false, false, "", {}};
    for (;;) {
      if (done()) throw ParseError("unbalanced '(' in SMT-LIB input");
      if (tokens_[pos_].kind == Token::Close) {
        ++pos_;
        return list;
      }
      list.items.push_back(read());
    }
  }

 private:
  std::vector<Token> tokens_;
  std::size_t pos_ = 0;
};

bool is_head(const SExpr& e, const char* head) {
  return !e.atom && !e.items.empty() && e.items[0].atom && !e.items[0].quoted && e.items[0].text == head;
}

class Parser {
 public:
  explicit Parser(EtrSentence& out) : out_(out) {}

  Polynomial expr(const SExpr& e) {
    if (e.atom) {
      if (e.quoted) return Polynomial::variable(lookup(e.text));
      if (!e.text.empty() && std::isdigit(static_cast<unsigned char>(e.text[0]))) {
        return Polynomial::constant(Rational::parse(e.text));
      }
      return Polynomial::variable(lookup(e.text));
    }
    if (e.items.empty() || !e.items[0].atom) throw ParseError("malformed SMT-LIB term");
    const std::string& op = e.items[0].text;
    if (op == "+") {
      Polynomial sum;
      for (std::size_t k = 1; k < e.items.size(); ++k) sum += expr(e.items[k]);
      return sum;
    }
    if (op == "*") {
      Polynomial prod = Polynomial::constant(Rational(1));
      for (std::size_t k = 1; k < e.items.size(); ++k) prod = prod * expr(e.items[k]);
      return prod;
    }
    if (op == "-") {
      if (e.items.size() == 2) return Polynomial() - expr(e.items[1]);
      if (e.items.size() < 2) throw ParseError("malformed SMT-LIB subtraction");
      Polynomial diff = expr(e.items[1]);
      for (std::size_t k = 2; k < e.items.size(); ++k) diff -= expr(e.items[k]);
      return diff;
    }
    if (op == "/") {
      if (e.items.size() != 3) throw ParseError("malformed SMT-LIB division");
      const Rational num = constant_of(expr(e.items[1]));
      const Rational den = constant_of(expr(e.items[2]));
      if (den.is_zero()) throw ParseError("division by zero in SMT-LIB input");
      return Polynomial::constant(num / den);
    }
    throw ParseError("unsupported SMT-LIB operator '" + op + "'");
  }

  std::size_t lookup(const std::string& name) {
    const auto k = out_.find_variable(name);
    if (!k) throw ParseError("undeclared variable '" + name + "'");
    return *k;
  }

 private:
  static Rational constant_of(const Polynomial& p) {
    if (p.is_zero()) return Rational(0);
    if (p.terms().size() != 1 || !p.terms().begin()->first.empty()) throw ParseError("division by a non-constant");
    return p.terms().begin()->second;
  }

  EtrSentence& out_;
};

std::string atom_text(const SExpr& e, const char* what) {
  if (!e.atom) throw ParseError(std::string("expected a symbol for ") + what);
  return e.text;
}

void read_metadata(EtrSentence& out, const std::vector<Token>& tokens) {
  if (tokens.empty() || tokens[0].kind != Token::Symbol) return;
  const std::string& key = tokens[0].text;
  if (key == "@component") {
    if (tokens.size() < 4) throw ParseError("malformed @component line");
    EtrComponent c;
    c.gain_variable = tokens[1].text;
    c.anchor = tokens[2].text;
    for (std::size_t k = 3; k < tokens.size(); ++k) c.states.push_back(tokens[k].text);
    out.components.push_back(std::move(c));
  } else if (key == "@lambda") {
    if (tokens.size() != 2) throw ParseError("malformed @lambda line");
    out.lambda = Rational::parse(tokens[1].text);
  } else if (key == "@query") {
    if (tokens.size() != 2) throw ParseError("malformed @query line");
    out.query_state = tokens[1].text;
  }
}

}  // namespace

std::string to_smtlib(const EtrSentence& s) {
  std::ostringstream os;
  os << "; existential sentence over the reals (rewards normalised by the reward scale)\n";
  os << "(set-logic QF_NRA)\n";
  for (const EtrComponent& c : s.components) {
    os << "; @component " << symbol(c.gain_variable) << " " << symbol(c.anchor);
    for (const std::string& st : c.states) os << " " << symbol(st);
    os << "\n";
  }
  if (s.lambda) os << "; @lambda " << s.lambda->str() << "\n";
  if (s.query_state) os << "; @query " << symbol(*s.query_state) << "\n";
  for (const std::string& v : s.variables) os << "(declare-fun " << symbol(v) << " () Real)\n";
  for (const Constraint& c : s.constraints) {
    os << "(assert (! (" << relation_symbol(c.relation) << " " << expression(s, c.lhs) << " " << expression(s, c.rhs)
       << ") :named " << symbol(c.label) << "))\n";
  }
  os << "(check-sat)\n";
  return os.str();
}

EtrSentence parse_smtlib(std::string_view text) {
  EtrSentence out;
  std::vector<Token> tokens;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    std::size_t end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    const std::string_view line = text.substr(start, end - start);
    ++line_no;
    const std::size_t first = line.find_first_not_of(" \t\r");
    if (first != std::string_view::npos && line.substr(first).starts_with("; @")) {
      read_metadata(out, tokenize(line.substr(first + 2), line_no));
    } else {
      for (Token& t : tokenize(line, line_no)) tokens.push_back(std::move(t));
    }
    start = end + 1;
  }

  Reader reader(std::move(tokens));
  Parser parser(out);
  while (!reader.done()) {
    const SExpr cmd = reader.read();
    if (cmd.atom || cmd.items.empty()) throw ParseError("expected an SMT-LIB command");
    const std::string head = atom_text(cmd.items[0], "command");
    if (head == "set-logic" || head == "check-sat" || head == "exit" || head == "set-info" || head == "set-option") {
      continue;
    }
    if (head == "declare-fun" || head == "declare-const") {
      if (cmd.items.size() < 3) throw ParseError("malformed declaration");
      const std::string name = atom_text(cmd.items[1], "declared name");
      const SExpr& sort = cmd.items.back();
      if (!sort.atom || sort.text != "Real") throw ParseError("variable '" + name + "' must have sort Real");
      if (out.find_variable(name)) throw ParseError("variable '" + name + "' declared twice");
      out.variables.push_back(name);
      continue;
    }
    if (head != "assert" || cmd.items.size() != 2) throw ParseError("unsupported SMT-LIB command '" + head + "'");
    const SExpr* body = &cmd.items[1];
    std::string label = "assert#" + std::to_string(out.constraints.size());
    if (is_head(*body, "!")) {
      for (std::size_t k = 2; k + 1 < body->items.size(); k += 2) {
        if (body->items[k].atom && body->items[k].text == ":named") label = atom_text(body->items[k + 1], ":named");
      }
      body = &body->items[1];
    }
    if (body->atom || body->items.size() != 3) throw ParseError("constraint '" + label + "' must be a binary relation");
    const std::string rel = atom_text(body->items[0], "relation");
    Constraint c;
    if (rel == "<=") {
      c.relation = Relation::Le;
    } else if (rel == ">=") {
      c.relation = Relation::Ge;
    } else if (rel == "=") {
      c.relation = Relation::Eq;
    } else {
      throw ParseError("unsupported relation '" + rel + "' in constraint '" + label + "'");
    }
    c.lhs = parser.expr(body->items[1]);
    c.rhs = parser.expr(body->items[2]);
    c.label = label;
    out.constraints.push_back(std::move(c));
  }
  return out;
}

}  // namespace cmpg
