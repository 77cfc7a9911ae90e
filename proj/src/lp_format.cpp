#include "storyline/lp_format.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace storyline {

namespace {

std::string number(double v) {
  if (v == kInf) return "+inf";
  if (v == -kInf) return "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

// Appends tokens, wrapping long lines as the format requires.
class LineWriter {
 public:
  explicit LineWriter(std::ostringstream& os) : os_(os) {}
  void put(const std::string& token) {
    if (width_ + token.size() + 1 > 200) {
      os_ << "\n  ";
      width_ = 2;
    }
    os_ << ' ' << token;
    width_ += token.size() + 1;
  }
  void end() {
    os_ << '\n';
    width_ = 0;
  }

 private:
  std::ostringstream& os_;
  std::size_t width_ = 0;
};

void putTerm(LineWriter& w, double coeff, const std::string& name, bool first) {
  if (coeff < 0.0 || (coeff == 0.0 && std::signbit(coeff))) {
    w.put("-");
    w.put(number(-coeff));
  } else {
    if (!first) w.put("+");
    w.put(number(coeff));
  }
  w.put(name);
}

enum class Section { None, Objective, Constraints, Bounds, General, Binary, End };

std::string lower(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return s;
}

std::optional<Section> sectionKeyword(const std::string& line) {
  const std::string l = lower(line);
  if (l == "minimize" || l == "minimise" || l == "min") return Section::Objective;
  if (l == "subject to" || l == "such that" || l == "st" || l == "s.t.") return Section::Constraints;
  if (l == "bounds" || l == "bound") return Section::Bounds;
  if (l == "general" || l == "generals" || l == "gen") return Section::General;
  if (l == "binary" || l == "binaries" || l == "bin") return Section::Binary;
  if (l == "end") return Section::End;
  return std::nullopt;
}

struct Token {
  std::string text;
  std::size_t line;
};

bool isOperatorChar(char c) { return c == '+' || c == '-' || c == '[' || c == ']' || c == '^' || c == '/' || c == ':' || c == '<' || c == '>' || c == '=' || c == '*'; }

void tokenize(const std::string& text, std::size_t line, std::vector<Token>& out) {
  std::size_t i = 0;
  while (i < text.size()) {
    const char c = text[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    if (c == '<' || c == '>' || c == '=') {
      std::string op(1, c);
      if (i + 1 < text.size() && (text[i + 1] == '=' || text[i + 1] == '<' || text[i + 1] == '>')) op += text[++i];
      ++i;
      if (op == "=<") op = "<=";
      if (op == "=>") op = ">=";
      if (op == "<") op = "<=";
      if (op == ">") op = ">=";
      out.push_back({op, line});
      continue;
    }
    if (isOperatorChar(c)) {
      out.push_back({std::string(1, c), line});
      ++i;
      continue;
    }
    std::size_t j = i;
    while (j < text.size() && !std::isspace(static_cast<unsigned char>(text[j])) && !isOperatorChar(text[j])) ++j;
    // Exponent sign inside a number such as 1e-05.
    while (j < text.size() && (text[j] == '-' || text[j] == '+') && j > i &&
           (text[j - 1] == 'e' || text[j - 1] == 'E') &&
           (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.')) {
      ++j;
      while (j < text.size() && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
    }
    out.push_back({text.substr(i, j - i), line});
    i = j;
  }
}

std::optional<double> asNumber(const std::string& s) {
  const std::string l = lower(s);
  if (l == "inf" || l == "infinity") return kInf;
  if (s.empty() || !(std::isdigit(static_cast<unsigned char>(s[0])) || s[0] == '.')) return std::nullopt;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

class Reader {
 public:
  OptimizationModel read(std::string_view text) {
    std::istringstream in{std::string(text)};
    std::string raw;
    std::size_t lineNo = 0;
    Section section = Section::None;
    std::vector<Token> tokens;
    const auto flush = [&] {
      handle(section, tokens);
      tokens.clear();
    };
    while (std::getline(in, raw)) {
      ++lineNo;
      if (auto pos = raw.find('\\'); pos != std::string::npos) raw.erase(pos);
      std::string trimmed = raw;
      while (!trimmed.empty() && std::isspace(static_cast<unsigned char>(trimmed.back()))) trimmed.pop_back();
      std::size_t start = 0;
      while (start < trimmed.size() && std::isspace(static_cast<unsigned char>(trimmed[start]))) ++start;
      trimmed = trimmed.substr(start);
      if (trimmed.empty()) continue;
      if (auto s = sectionKeyword(trimmed)) {
        flush();
        section = *s;
        if (section == Section::End) break;
        continue;
      }
      if (section == Section::None) throw std::runtime_error("LP line " + std::to_string(lineNo) + ": text before any section");
      tokenize(trimmed, lineNo, tokens);
    }
    flush();
    for (std::size_t j = 0; j < model_.variableCount(); ++j) {
      if (binary_[j]) {
        model_.variables[j].integral = true;
        if (!boundsSeen_[j]) model_.variables[j].upper = 1.0;
      }
    }
    return std::move(model_);
  }

 private:
  [[noreturn]] static void fail(const Token& t, const std::string& what) {
    throw std::runtime_error("LP line " + std::to_string(t.line) + ": " + what + " near '" + t.text + "'");
  }

  std::size_t var(const std::string& name) {
    auto it = byName_.find(name);
    if (it != byName_.end()) return it->second;
    const auto v = model_.addVariable(name, 0.0, kInf);
    byName_.emplace(name, v);
    binary_.push_back(false);
    boundsSeen_.push_back(false);
    return v;
  }

  // Parses "[+|-] [coef] name" terms and quadratic brackets starting at pos.
  // Stops at a relation token. Returns linear terms.
  std::vector<Term> expression(const std::vector<Token>& tk, std::size_t& pos, bool objective) {
    std::vector<Term> terms;
    while (pos < tk.size()) {
      const std::string& s = tk[pos].text;
      if (s == "<=" || s == ">=" || s == "=") break;
      if (s == "[") {
        if (!objective) fail(tk[pos], "quadratic term in a constraint");
        ++pos;
        quadraticBlock(tk, pos, 1.0);
        continue;
      }
      double sign = 1.0;
      while (pos < tk.size() && (tk[pos].text == "+" || tk[pos].text == "-")) {
        if (tk[pos].text == "-") sign = -sign;
        ++pos;
      }
      if (pos >= tk.size()) break;
      if (tk[pos].text == "[") {
        if (!objective) fail(tk[pos], "quadratic term in a constraint");
        ++pos;
        quadraticBlock(tk, pos, sign);
        continue;
      }
      double coeff = 1.0;
      if (auto num = asNumber(tk[pos].text)) {
        coeff = *num;
        ++pos;
        if (pos < tk.size() && tk[pos].text == "*") ++pos;
        if (pos >= tk.size() || asNumber(tk[pos].text) || isOperatorChar(tk[pos].text[0])) {
          // Bare constant; the objective offset is not represented.
          continue;
        }
      }
      if (isOperatorChar(tk[pos].text[0])) fail(tk[pos], "expected a variable");
      terms.push_back({var(tk[pos].text), sign * coeff});
      ++pos;
    }
    return terms;
  }

  void quadraticBlock(const std::vector<Token>& tk, std::size_t& pos, double outerSign) {
    std::vector<std::pair<std::size_t, double>> quad;
    while (pos < tk.size() && tk[pos].text != "]") {
      double sign = 1.0;
      while (pos < tk.size() && (tk[pos].text == "+" || tk[pos].text == "-")) {
        if (tk[pos].text == "-") sign = -sign;
        ++pos;
      }
      double coeff = 1.0;
      if (pos < tk.size()) {
        if (auto num = asNumber(tk[pos].text)) {
          coeff = *num;
          ++pos;
        }
      }
      if (pos + 2 >= tk.size() || tk[pos + 1].text != "^" || tk[pos + 2].text != "2")
        fail(tk[std::min(pos, tk.size() - 1)], "only squared terms are supported");
      quad.push_back({var(tk[pos].text), sign * coeff});
      pos += 3;
    }
    if (pos >= tk.size()) fail(tk.back(), "unterminated quadratic block");
    ++pos;  // ]
    double divisor = 1.0;
    if (pos + 1 < tk.size() && tk[pos].text == "/") {
      const auto d = asNumber(tk[pos + 1].text);
      if (!d) fail(tk[pos + 1], "expected a divisor");
      divisor = *d;
      pos += 2;
    }
    for (const auto& [v, c] : quad) model_.quadratic[v] += outerSign * c / divisor;
  }

  static std::optional<std::string> label(const std::vector<Token>& tk, std::size_t pos) {
    if (pos + 1 < tk.size() && tk[pos + 1].text == ":") return tk[pos].text;
    return std::nullopt;
  }

  void handle(Section section, const std::vector<Token>& tk) {
    if (tk.empty()) return;
    std::size_t pos = 0;
    switch (section) {
      case Section::Objective: {
        if (label(tk, pos)) pos += 2;
        for (const auto& t : expression(tk, pos, true)) model_.linear[t.var] += t.coeff;
        if (pos < tk.size()) fail(tk[pos], "unexpected relation in objective");
        break;
      }
      case Section::Constraints: {
        while (pos < tk.size()) {
          std::string name = "c" + std::to_string(model_.constraintCount() + 1);
          if (auto l = label(tk, pos)) {
            name = *l;
            pos += 2;
          }
          auto terms = expression(tk, pos, false);
          if (pos >= tk.size()) fail(tk.back(), "constraint without relation");
          const std::string& rel = tk[pos].text;
          const Relation r = rel == "<=" ? Relation::LessEqual : rel == ">=" ? Relation::GreaterEqual : Relation::Equal;
          ++pos;
          double sign = 1.0;
          while (pos < tk.size() && (tk[pos].text == "+" || tk[pos].text == "-")) {
            if (tk[pos].text == "-") sign = -sign;
            ++pos;
          }
          if (pos >= tk.size()) fail(tk.back(), "missing right-hand side");
          const auto rhs = asNumber(tk[pos].text);
          if (!rhs) fail(tk[pos], "expected a number");
          ++pos;
          model_.addConstraint(std::move(name), std::move(terms), r, sign * *rhs);
        }
        break;
      }
      case Section::Bounds: bounds(tk); break;
      case Section::General:
      case Section::Binary:
        for (const auto& t : tk) {
          const auto v = var(t.text);
          model_.variables[v].integral = true;
          if (section == Section::Binary) binary_[v] = true;
        }
        break;
      case Section::None:
      case Section::End: break;
    }
  }

  std::optional<double> signedNumber(const std::vector<Token>& tk, std::size_t& pos) {
    double sign = 1.0;
    std::size_t p = pos;
    while (p < tk.size() && (tk[p].text == "+" || tk[p].text == "-")) {
      if (tk[p].text == "-") sign = -sign;
      ++p;
    }
    if (p >= tk.size()) return std::nullopt;
    const auto v = asNumber(tk[p].text);
    if (!v) return std::nullopt;
    pos = p + 1;
    return sign * *v;
  }

  void bounds(const std::vector<Token>& tk) {
    std::size_t pos = 0;
    while (pos < tk.size()) {
      if (auto lo = signedNumber(tk, pos)) {
        // l <= x [<= u]   or   l = x is not produced by the writer.
        if (pos >= tk.size() || tk[pos].text != "<=") fail(tk[std::min(pos, tk.size() - 1)], "expected <=");
        ++pos;
        const auto v = var(tk.at(pos++).text);
        model_.variables[v].lower = *lo;
        boundsSeen_[v] = true;
        if (pos < tk.size() && tk[pos].text == "<=") {
          ++pos;
          const auto hi = signedNumber(tk, pos);
          if (!hi) fail(tk[std::min(pos, tk.size() - 1)], "expected a number");
          model_.variables[v].upper = *hi;
        }
        continue;
      }
      const auto v = var(tk.at(pos++).text);
      boundsSeen_[v] = true;
      if (pos >= tk.size()) fail(tk.back(), "incomplete bound");
      const std::string op = lower(tk[pos].text);
      ++pos;
      if (op == "free") {
        model_.variables[v].lower = -kInf;
        model_.variables[v].upper = kInf;
        continue;
      }
      const auto value = signedNumber(tk, pos);
      if (!value) fail(tk[std::min(pos, tk.size() - 1)], "expected a number");
      if (op == "<=") model_.variables[v].upper = *value;
      else if (op == ">=") model_.variables[v].lower = *value;
      else if (op == "=") model_.variables[v].lower = model_.variables[v].upper = *value;
      else fail(tk[pos - 1], "unknown bound operator");
    }
  }

  OptimizationModel model_;
  std::unordered_map<std::string, std::size_t> byName_;
  std::vector<bool> binary_;
  std::vector<bool> boundsSeen_;
};

}  // namespace

std::string writeLpFile(const OptimizationModel& model) {
  model.validate();
  std::ostringstream os;
  LineWriter w(os);
  os << "\\ storyline model: " << model.variableCount() << " variables, " << model.constraintCount()
     << " constraints\n";
  os << "Minimize\n";
  w.put("obj:");
  bool first = true;
  for (std::size_t j = 0; j < model.variableCount(); ++j) {
    putTerm(w, model.linear[j], model.variables[j].name, first);
    first = false;
  }
  if (model.hasQuadratic()) {
    w.put("+");
    w.put("[");
    bool firstQ = true;
    for (std::size_t j = 0; j < model.variableCount(); ++j) {
      if (model.quadratic[j] == 0.0) continue;
      if (!firstQ) w.put("+");
      w.put(number(2.0 * model.quadratic[j]));
      w.put(model.variables[j].name);
      w.put("^2");
      firstQ = false;
    }
    w.put("]");
    w.put("/");
    w.put("2");
  }
  w.end();

  os << "Subject To\n";
  for (const auto& con : model.constraints) {
    w.put(con.name + ":");
    bool firstT = true;
    for (const auto& t : con.terms) {
      putTerm(w, t.coeff, model.variables[t.var].name, firstT);
      firstT = false;
    }
    if (con.terms.empty()) w.put("0 " + model.variables.front().name);
    w.put(con.relation == Relation::LessEqual ? "<=" : con.relation == Relation::GreaterEqual ? ">=" : "=");
    w.put(number(con.rhs));
    w.end();
  }

  os << "Bounds\n";
  for (const auto& v : model.variables) {
    if (v.lower == -kInf && v.upper == kInf) {
      w.put(v.name);
      w.put("free");
    } else if (v.lower == v.upper) {
      w.put(v.name);
      w.put("=");
      w.put(number(v.lower));
    } else {
      w.put(number(v.lower));
      w.put("<=");
      w.put(v.name);
      w.put("<=");
      w.put(number(v.upper));
    }
    w.end();
  }

  bool anyGeneral = false, anyBinary = false;
  for (const auto& v : model.variables) {
    if (!v.integral) continue;
    (v.lower == 0.0 && v.upper == 1.0 ? anyBinary : anyGeneral) = true;
  }
  if (anyGeneral) {
    os << "General\n";
    for (const auto& v : model.variables)
      if (v.integral && !(v.lower == 0.0 && v.upper == 1.0)) w.put(v.name);
    w.end();
  }
  if (anyBinary) {
    os << "Binary\n";
    for (const auto& v : model.variables)
      if (v.integral && v.lower == 0.0 && v.upper == 1.0) w.put(v.name);
    w.end();
  }
  os << "End\n";
  return os.str();
}

OptimizationModel readLpFile(std::string_view text) {
  Reader reader;
  return reader.read(text);
}

std::optional<SolveStatus> parseStatus(std::string_view name) {
  for (auto s : {SolveStatus::Optimal, SolveStatus::Infeasible, SolveStatus::Unbounded, SolveStatus::IterationLimit,
                 SolveStatus::TimeLimit})
    if (statusName(s) == name) return s;
  return std::nullopt;
}

std::string writeSolutionFile(const OptimizationModel& model, const SolveResult& result) {
  std::ostringstream os;
  os << "# Status = " << statusName(result.status) << "\n";
  if (result.assignment.size() != model.variableCount()) return os.str();
  os << "# Objective value = " << number(result.objectiveValue) << "\n";
  for (std::size_t j = 0; j < model.variableCount(); ++j)
    os << model.variables[j].name << ' ' << number(result.assignment[j]) << "\n";
  return os.str();
}

SolutionFile readSolutionFile(std::string_view text) {
  SolutionFile out;
  std::istringstream in{std::string(text)};
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto eq = line.find('=');
      if (eq == std::string::npos) continue;
      std::string key = lower(line.substr(1, eq - 1));
      std::string value = line.substr(eq + 1);
      const auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
      };
      key = trim(key);
      value = trim(value);
      if (key == "objective value") out.objective = std::stod(value);
      else if (key == "status") out.status = parseStatus(value);
      continue;
    }
    std::istringstream ls(line);
    std::string name, value;
    if (!(ls >> name >> value)) throw std::runtime_error("solution line " + std::to_string(lineNo) + ": expected 'name value'");
    out.values[name] = std::stod(value);
  }
  return out;
}

}  // namespace storyline
