#include "spinsemi/field.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "spinsemi/errors.hpp"

namespace spinsemi {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const std::size_t pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? pos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<double> parse_reals(std::string_view s) {
  std::vector<double> v;
  for (auto tok : split(s, ',')) v.push_back(parse_real(tok));
  return v;
}

// Reads non-blank lines; the first must equal the expected header.
std::vector<std::string> read_csv_body(const std::string& path, std::string_view header) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open field file '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  bool seen_header = false;
  while (std::getline(in, line)) {
    std::string_view l = trim(line);
    if (l.empty()) continue;
    if (!seen_header) {
      if (l.size() >= 3 && l.substr(0, 3) == "\xEF\xBB\xBF") l.remove_prefix(3);
      std::string norm;
      for (auto tok : split(l, ',')) norm += std::string(tok) + ",";
      if (!norm.empty()) norm.pop_back();
      if (norm != header)
        throw ParseError("field file '" + path + "' must start with header '" + std::string(header) + "'");
      seen_header = true;
      continue;
    }
    lines.emplace_back(l);
  }
  if (!seen_header) throw ParseError("field file '" + path + "' is empty");
  return lines;
}

double fourier_sum(const std::vector<FourierTerm>& terms, double t) {
  double s = 0.0;
  for (const auto& k : terms) s += k.cos_amp * std::cos(k.omega * t) + k.sin_amp * std::sin(k.omega * t);
  return s;
}

void require_finite(std::initializer_list<double> xs, const char* what) {
  for (double x : xs)
    if (!std::isfinite(x)) throw ParameterError(std::string(what) + " parameters must be finite");
}

std::string fmt(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

double FieldSample::norm() const { return std::sqrt(bx * bx + by * by + bz * bz); }

double parse_real(std::string_view token) {
  const std::string s(trim(token));
  if (s.empty()) throw ParseError("expected a number, got an empty token");
  char* end = nullptr;
  errno = 0;
  const double v = std::strtod(s.c_str(), &end);
  if (end != s.c_str() + s.size() || errno == ERANGE || !std::isfinite(v))
    throw ParseError("not a finite decimal number: '" + s + "'");
  return v;
}

FieldSpec::FieldSpec(ConstantField f) : v_(f) { require_finite({f.bx, f.by, f.bz}, "constant field"); }

FieldSpec::FieldSpec(LandauZenerField f) : v_(f) {
  require_finite({f.omega, f.gamma, f.t_offset}, "Landau-Zener");
}

FieldSpec::FieldSpec(TabulatedField f) {
  if (f.knots.size() < 2) throw ParameterError("tabulated field needs at least two samples");
  for (std::size_t i = 0; i < f.knots.size(); ++i) {
    const auto& k = f.knots[i];
    require_finite({k.t, k.b.bx, k.b.by, k.b.bz}, "tabulated field");
    if (i > 0 && !(k.t > f.knots[i - 1].t))
      throw ParameterError("tabulated field times must be strictly increasing");
  }
  v_ = std::move(f);
}

FieldSpec::FieldSpec(FourierField f) {
  for (const auto* comp : {&f.x, &f.y, &f.z})
    for (const auto& k : *comp) require_finite({k.omega, k.cos_amp, k.sin_amp}, "Fourier");
  v_ = std::move(f);
}

std::vector<double> FieldSpec::breakpoints(double t0, double t1) const {
  std::vector<double> out;
  if (const auto* tab = std::get_if<TabulatedField>(&v_))
    for (const auto& k : tab->knots)
      if (k.t > t0 && k.t < t1) out.push_back(k.t);
  return out;
}

std::string FieldSpec::describe() const {
  struct Visitor {
    std::string operator()(const ConstantField& f) const {
      return "const:" + fmt(f.bx) + "," + fmt(f.by) + "," + fmt(f.bz);
    }
    std::string operator()(const LandauZenerField& f) const {
      return "lz:" + fmt(f.omega) + "," + fmt(f.gamma) + "," + fmt(f.t_offset);
    }
    std::string operator()(const TabulatedField& f) const {
      return "table:" + std::to_string(f.knots.size()) + " samples on [" + fmt(f.knots.front().t) +
             ", " + fmt(f.knots.back().t) + "]";
    }
    std::string operator()(const FourierField& f) const {
      return "fourier:" + std::to_string(f.x.size()) + "," + std::to_string(f.y.size()) + "," +
             std::to_string(f.z.size()) + " terms";
    }
  };
  return std::visit(Visitor{}, v_);
}

FieldSample field_at(const FieldSpec& f, double t) {
  struct Visitor {
    double t;
    FieldSample operator()(const ConstantField& c) const { return {c.bx, c.by, c.bz}; }
    FieldSample operator()(const LandauZenerField& lz) const {
      return {lz.omega, 0.0, -lz.gamma * lz.gamma * (t + lz.t_offset)};
    }
    FieldSample operator()(const TabulatedField& tab) const {
      const auto& k = tab.knots;
      const double slack = 1e-12 * std::max({1.0, std::abs(k.front().t), std::abs(k.back().t)});
      if (!(t >= k.front().t - slack && t <= k.back().t + slack))
        throw OutOfRangeError("time " + fmt(t) + " outside tabulated range [" + fmt(k.front().t) +
                              ", " + fmt(k.back().t) + "]");
      auto it = std::upper_bound(k.begin(), k.end(), t, [](double x, const TableKnot& n) { return x < n.t; });
      if (it == k.begin()) return k.front().b;
      if (it == k.end()) return k.back().b;
      const auto& hi = *it;
      const auto& lo = *(it - 1);
      const double w = (t - lo.t) / (hi.t - lo.t);
      return {lo.b.bx + w * (hi.b.bx - lo.b.bx), lo.b.by + w * (hi.b.by - lo.b.by),
              lo.b.bz + w * (hi.b.bz - lo.b.bz)};
    }
    FieldSample operator()(const FourierField& fo) const {
      return {fourier_sum(fo.x, t), fourier_sum(fo.y, t), fourier_sum(fo.z, t)};
    }
  };
  return std::visit(Visitor{t}, f.variant());
}

FieldFunction field_function(const FieldSpec& f) {
  return [f](double t) { return field_at(f, t); };
}

FieldSpec parse_field_spec(std::string_view text) {
  text = trim(text);
  const std::size_t colon = text.find(':');
  if (colon == std::string_view::npos)
    throw ParseError("field spec must look like kind:args, got '" + std::string(text) + "'");
  const std::string_view kind = text.substr(0, colon);
  const std::string_view args = text.substr(colon + 1);

  if (kind == "const") {
    const auto v = parse_reals(args);
    if (v.size() != 3) throw ParseError("const field needs bx,by,bz");
    return ConstantField{v[0], v[1], v[2]};
  }
  if (kind == "lz") {
    const auto v = parse_reals(args);
    if (v.size() != 2 && v.size() != 3) throw ParseError("lz field needs omega,gamma[,t_offset]");
    return LandauZenerField{v[0], v[1], v.size() == 3 ? v[2] : 0.0};
  }
  if (kind == "table") return read_table_csv(std::string(args));
  if (kind == "fourier") return read_fourier_csv(std::string(args));
  throw ParseError("unknown field kind '" + std::string(kind) + "'");
}

TabulatedField read_table_csv(const std::string& path) {
  TabulatedField tab;
  for (const auto& line : read_csv_body(path, "t,bx,by,bz")) {
    const auto v = parse_reals(line);
    if (v.size() != 4) throw ParseError("table row needs 4 columns: '" + line + "'");
    tab.knots.push_back({v[0], {v[1], v[2], v[3]}});
  }
  for (std::size_t i = 1; i < tab.knots.size(); ++i)
    if (!(tab.knots[i].t > tab.knots[i - 1].t))
      throw ParseError("table times must be strictly increasing in '" + path + "'");
  if (tab.knots.size() < 2) throw ParseError("table '" + path + "' needs at least two rows");
  return tab;
}

FourierField read_fourier_csv(const std::string& path) {
  FourierField f;
  for (const auto& line : read_csv_body(path, "component,omega,cos_amp,sin_amp")) {
    const auto cols = split(line, ',');
    if (cols.size() != 4) throw ParseError("fourier row needs 4 columns: '" + line + "'");
    const FourierTerm term{parse_real(cols[1]), parse_real(cols[2]), parse_real(cols[3])};
    if (cols[0] == "x")
      f.x.push_back(term);
    else if (cols[0] == "y")
      f.y.push_back(term);
    else if (cols[0] == "z")
      f.z.push_back(term);
    else
      throw ParseError("fourier component must be x, y or z: '" + line + "'");
  }
  return f;
}

double hamiltonian_angles(const FieldSample& b, const SphereAngles& p) {
  const double st = std::sin(p.theta());
  return 0.5 * (b.bx * st * std::cos(p.phi()) + b.by * st * std::sin(p.phi()) + b.bz * std::cos(p.theta()));
}

double hamiltonian_angles(const FieldSpec& f, const SphereAngles& p, double t) {
  return hamiltonian_angles(field_at(f, t), p);
}

cplx hamiltonian_stereo(const FieldSample& b, const StereoPair& p) {
  const cplx ze = p.zeta * p.eta;
  const cplx den = 1.0 + ze;
  if (std::abs(den) < 1e-14 * (1.0 + std::abs(ze)))
    throw PoleError("1 + zeta*eta vanishes in the stereographic Hamiltonian");
  const cplx i{0.0, 1.0};
  return 0.5 * (b.bx * (p.zeta + p.eta) - i * b.by * (p.zeta - p.eta) + b.bz * (1.0 - ze)) / den;
}

cplx hamiltonian_stereo(const FieldSpec& f, const StereoPair& p, double t) {
  return hamiltonian_stereo(field_at(f, t), p);
}

}  // namespace spinsemi
