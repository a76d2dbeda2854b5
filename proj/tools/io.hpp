#pragma once

#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"
#include "kleinian/schottky.hpp"

namespace kleinian::io {

using nlohmann::json;

struct GroupFile {
  SchottkyGroup group;
  std::optional<double> delta_hat;  // optional "delta_hat" key
  std::string name;
  json raw;
};

// { "n", "generators": [matrix rows...], "disks": [{center, radius, pairs_with}] }.
// Generators are checked for membership in SO(1,n)_0; the group is validated.
GroupFile parse_group(const json& j);
GroupFile load_group(const std::string& path);
json group_to_json(const SchottkyGroup& g, const std::string& name = "", std::optional<double> delta_hat = {});

// %.17g, with "nan"/"inf"/"-inf" for non-finite values.
std::string format_double(double x);

// One RFC-4180 record per row (CRLF line ends, quoting on demand).
class CsvWriter {
 public:
  explicit CsvWriter(std::ostream& os) : os_(os) {}
  void row(const std::vector<std::string>& fields);
  static std::string quote(const std::string& field);

 private:
  std::ostream& os_;
};

// "1.5", "-0.5+2i", "3i", "-i", "0.5,2" (re,im).
cplx parse_complex(const std::string& s);
std::string format_complex(cplx z);
json complex_json(cplx z);

}  // namespace kleinian::io
