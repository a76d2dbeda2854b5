#include "io.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>

namespace kleinian::io {

namespace {

double number(const json& j, const std::string& what) {
  if (!j.is_number()) throw config_error("group file: " + what + " must be a number");
  return j.get<double>();
}

}  // namespace

GroupFile parse_group(const json& j) {
  if (!j.is_object()) throw config_error("group file: top level must be an object");
  for (const char* key : {"n", "generators", "disks"})
    if (!j.contains(key)) throw config_error(std::string("group file: missing \"") + key + "\"");
  if (!j["n"].is_number_integer()) throw config_error("group file: n must be an integer");
  GroupFile out;
  out.raw = j;
  SchottkyGroup& g = out.group;
  g.n = j["n"].get<int>();
  if (g.n < 2) throw config_error("group file: n must be >= 2");
  if (!j["generators"].is_array() || !j["disks"].is_array())
    throw config_error("group file: generators and disks must be arrays");
  for (const json& gj : j["generators"]) {
    if (!gj.is_array() || gj.size() != static_cast<std::size_t>(g.n + 1))
      throw config_error("group file: each generator needs n+1 rows");
    Mat m(g.n + 1, g.n + 1);
    for (int r = 0; r <= g.n; ++r) {
      const json& row = gj[static_cast<std::size_t>(r)];
      if (!row.is_array() || row.size() != static_cast<std::size_t>(g.n + 1))
        throw config_error("group file: each generator row needs n+1 entries");
      for (int c = 0; c <= g.n; ++c) m(r, c) = number(row[static_cast<std::size_t>(c)], "matrix entry");
    }
    g.generators.emplace_back(m);
  }
  for (const json& dj : j["disks"]) {
    if (!dj.is_object() || !dj.contains("center") || !dj.contains("radius") || !dj["center"].is_array())
      throw config_error("group file: each disk needs center and radius");
    Vec c(static_cast<Eigen::Index>(dj["center"].size()));
    for (std::size_t i = 0; i < dj["center"].size(); ++i)
      c(static_cast<Eigen::Index>(i)) = number(dj["center"][i], "disk center");
    if (c.size() != g.n || !(c.norm() > 0)) throw config_error("group file: disk center must be a nonzero n-vector");
    Disk d;
    d.center = BoundaryPoint(c / c.norm());
    d.radius = number(dj["radius"], "disk radius");
    d.pairs_with = dj.value("pairs_with", -1);
    g.disks.push_back(d);
  }
  if (j.contains("delta_hat")) out.delta_hat = number(j["delta_hat"], "delta_hat");
  out.name = j.value("name", std::string());
  validate(g);
  return out;
}

GroupFile load_group(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw config_error("cannot open group file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw config_error("group file " + path + ": " + e.what());
  }
  return parse_group(j);
}

json group_to_json(const SchottkyGroup& g, const std::string& name, std::optional<double> delta_hat) {
  json j;
  if (!name.empty()) j["name"] = name;
  j["n"] = g.n;
  j["generators"] = json::array();
  for (const GroupElement& x : g.generators) {
    json m = json::array();
    for (Eigen::Index r = 0; r < x.matrix().rows(); ++r) {
      json row = json::array();
      for (Eigen::Index c = 0; c < x.matrix().cols(); ++c) row.push_back(x(static_cast<int>(r), static_cast<int>(c)));
      m.push_back(row);
    }
    j["generators"].push_back(m);
  }
  j["disks"] = json::array();
  for (const Disk& d : g.disks) {
    json c = json::array();
    for (Eigen::Index i = 0; i < d.center.coords.size(); ++i) c.push_back(d.center.coords(i));
    j["disks"].push_back({{"center", c}, {"radius", d.radius}, {"pairs_with", d.pairs_with}});
  }
  if (delta_hat) j["delta_hat"] = *delta_hat;
  return j;
}

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string CsvWriter::quote(const std::string& f) {
  if (f.find_first_of(",\"\r\n") == std::string::npos) return f;
  std::string q = "\"";
  for (char c : f) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) os_ << ',';
    os_ << quote(fields[i]);
  }
  os_ << "\r\n";
}

cplx parse_complex(const std::string& text) {
  std::string s;
  for (char c : text)
    if (!std::isspace(static_cast<unsigned char>(c))) s += c;
  if (s.empty()) throw config_error("empty complex number");
  auto real = [&](const std::string& t) -> double {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(t, &used);
    } catch (const std::exception&) {
      throw config_error("cannot parse number \"" + t + "\" in \"" + text + "\"");
    }
    if (used != t.size()) throw config_error("cannot parse number \"" + t + "\" in \"" + text + "\"");
    return v;
  };
  if (const auto comma = s.find(','); comma != std::string::npos)
    return {real(s.substr(0, comma)), real(s.substr(comma + 1))};
  if (s.back() != 'i') return {real(s), 0.0};
  s.pop_back();
  // split at the last sign that is not an exponent sign
  std::size_t split = std::string::npos;
  for (std::size_t k = s.size(); k-- > 1;)
    if ((s[k] == '+' || s[k] == '-') && s[k - 1] != 'e' && s[k - 1] != 'E') {
      split = k;
      break;
    }
  auto imag = [&](const std::string& t) {
    if (t.empty() || t == "+") return 1.0;
    if (t == "-") return -1.0;
    return real(t);
  };
  if (split == std::string::npos) return {0.0, imag(s)};
  return {real(s.substr(0, split)), imag(s.substr(split))};
}

std::string format_complex(cplx z) {
  std::string im = format_double(z.imag());
  if (im[0] != '-') im = "+" + im;
  return format_double(z.real()) + im + "i";
}

json complex_json(cplx z) { return json::array({z.real(), z.imag()}); }

}  // namespace kleinian::io
