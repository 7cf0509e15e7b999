#include <cctype>
#include <charconv>
#include <string>

#include "matman/error.hpp"
#include "matman/manifold.hpp"

namespace matman {
namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

[[noreturn]] void bad(std::string_view spec, const std::string& why) {
  fail(ErrorCode::invalid_input,
       "manifold spec '" + std::string(spec) + "': " + why);
}

int parse_int(std::string_view spec, std::string_view s) {
  s = trim(s);
  int v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) bad(spec, "expected an integer");
  return v;
}

// Splits "(a)x(b)x(c)" at top-level 'x' separators.
std::vector<std::string_view> split_factors(std::string_view spec, std::string_view body) {
  std::vector<std::string_view> out;
  while (true) {
    body = trim(body);
    if (body.empty() || body.front() != '(') bad(spec, "product factors must be parenthesised");
    int depth = 0;
    std::size_t j = 0;
    for (; j < body.size(); ++j) {
      if (body[j] == '(') ++depth;
      if (body[j] == ')' && --depth == 0) break;
    }
    if (j == body.size()) bad(spec, "unbalanced parentheses");
    out.push_back(body.substr(1, j - 1));
    body = trim(body.substr(j + 1));
    if (body.empty()) break;
    if (body.front() != 'x') bad(spec, "expected 'x' between factors");
    body.remove_prefix(1);
  }
  return out;
}

}  // namespace

ManifoldPtr parse_manifold(std::string_view spec_in) {
  const std::string_view spec = trim(spec_in);
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) bad(spec, "missing ':'");
  const std::string_view kind = trim(spec.substr(0, colon));
  const std::string_view args = spec.substr(colon + 1);

  if (kind == "product") {
    std::vector<ManifoldPtr> factors;
    for (auto f : split_factors(spec, args)) factors.push_back(parse_manifold(f));
    return make_product(std::move(factors));
  }
  if (kind == "grassmann") {
    const auto comma = args.find(',');
    if (comma == std::string_view::npos) bad(spec, "grassmann needs k,n");
    return make_grassmann(parse_int(spec, args.substr(0, comma)),
                          parse_int(spec, args.substr(comma + 1)));
  }
  const int n = parse_int(spec, args);
  if (kind == "euclidean") return make_euclidean(n);
  if (kind == "sphere") return make_sphere(n);
  if (kind == "lorentz" || kind == "hyperbolic") return make_lorentz(n);
  if (kind == "spd") return make_spd(n);
  if (kind == "stein") return make_stein(n);
  if (kind == "so") return make_special_orthogonal(n);
  bad(spec, "unknown manifold kind");
}

}  // namespace matman
