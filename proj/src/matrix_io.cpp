#include "momentlab/matrix_io.hpp"

#include <cctype>
#include <fstream>
#include <sstream>
#include <vector>

namespace momentlab {

nlohmann::json matrix_to_json(const CMatrix& m)
{
  nlohmann::json re = nlohmann::json::array();
  nlohmann::json im = nlohmann::json::array();
  for (const auto& v : m.data()) {
    re.push_back(v.real());
    im.push_back(v.imag());
  }
  return {{"rows", m.rows()}, {"cols", m.cols()}, {"re", re}, {"im", im}};
}

CMatrix matrix_from_json(const nlohmann::json& j)
{
  try {
    const auto rows = j.at("rows").get<std::size_t>();
    const auto cols = j.at("cols").get<std::size_t>();
    const auto re = j.at("re").get<std::vector<double>>();
    std::vector<double> im(re.size(), 0.0);
    if (j.contains("im")) im = j.at("im").get<std::vector<double>>();
    if (re.size() != rows * cols || im.size() != rows * cols) {
      throw ParseError("re/im length does not match rows*cols");
    }
    std::vector<Complex> data(rows * cols);
    for (std::size_t k = 0; k < data.size(); ++k) data[k] = {re[k], im[k]};
    return CMatrix(rows, cols, std::move(data));
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("matrix JSON: ") + e.what());
  }
}

namespace {

class Scanner {
 public:
  explicit Scanner(std::string_view text) : text_(text) {}

  void skip_space()
  {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end()
  {
    skip_space();
    return pos_ >= text_.size();
  }

  char peek()
  {
    skip_space();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  bool accept(char c)
  {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c)
  {
    if (!accept(c)) fail(std::string("expected '") + c + "'");
  }

  bool accept_word(std::string_view w)
  {
    skip_space();
    if (text_.substr(pos_, w.size()) == w) {
      pos_ += w.size();
      return true;
    }
    return false;
  }

  bool starts_number()
  {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.';
  }

  double number()
  {
    skip_space();
    const std::size_t start = pos_;
    auto digits = [&] {
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    };
    digits();
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      digits();
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < text_.size() && (text_[pos_] == '+' || text_[pos_] == '-')) ++pos_;
      const std::size_t exp_start = pos_;
      digits();
      if (pos_ == exp_start) pos_ = save;
    }
    if (pos_ == start) fail("expected a number");
    return std::stod(std::string(text_.substr(start, pos_ - start)));
  }

  // term := number ['i'] | 'i', optionally followed by '/' number
  Complex term()
  {
    Complex value;
    if (starts_number()) {
      const double x = number();
      value = accept('i') ? Complex(0.0, x) : Complex(x, 0.0);
    } else if (accept('i')) {
      value = Complex(0.0, 1.0);
    } else {
      fail("expected a complex term");
    }
    while (accept('/')) {
      const double d = number();
      if (d == 0.0) fail("division by zero");
      value /= d;
    }
    return value;
  }

  Complex complex_value()
  {
    double sign = 1.0;
    if (accept('-')) {
      sign = -1.0;
    } else {
      accept('+');
    }
    Complex value = sign * term();
    for (;;) {
      if (accept('+')) {
        value += term();
      } else if (accept('-')) {
        value -= term();
      } else {
        break;
      }
    }
    return value;
  }

  std::vector<Complex> list(char close)
  {
    std::vector<Complex> out;
    if (accept(close)) return out;
    do {
      out.push_back(complex_value());
    } while (accept(','));
    expect(close);
    return out;
  }

  [[noreturn]] void fail(const std::string& what) const
  {
    throw ParseError(what + " at offset " + std::to_string(pos_) + " in '" + std::string(text_) + "'");
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

}  // namespace

Complex parse_complex(std::string_view text)
{
  Scanner s(text);
  const Complex z = s.complex_value();
  if (!s.at_end()) s.fail("trailing characters");
  return z;
}

CMatrix parse_matrix_literal(std::string_view text)
{
  Scanner s(text);
  if (s.peek() == '{') {
    try {
      return matrix_from_json(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(std::string("inline JSON: ") + e.what());
    }
  }
  if (s.accept_word("diag")) {
    s.expect('(');
    const auto d = s.list(')');
    if (!s.at_end()) s.fail("trailing characters");
    return CMatrix::diagonal(std::span<const Complex>(d));
  }
  s.expect('[');
  std::vector<std::vector<Complex>> rows;
  if (!s.accept(']')) {
    do {
      s.expect('[');
      rows.push_back(s.list(']'));
    } while (s.accept(','));
    s.expect(']');
  }
  if (!s.at_end()) s.fail("trailing characters");
  const std::size_t cols = rows.empty() ? 0 : rows.front().size();
  std::vector<Complex> data;
  for (const auto& r : rows) {
    if (r.size() != cols) throw ParseError("ragged rows in matrix literal");
    data.insert(data.end(), r.begin(), r.end());
  }
  return CMatrix(rows.size(), cols, std::move(data));
}

CMatrix load_matrix(const std::string& literal_or_path)
{
  try {
    return parse_matrix_literal(literal_or_path);
  } catch (const ParseError&) {
    std::ifstream in(literal_or_path);
    if (!in) throw;
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_matrix_literal(buf.str());
  }
}

}  // namespace momentlab
