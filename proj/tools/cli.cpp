#include "cli.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "io.hpp"
#include "kleinian/gammaops.hpp"
#include "kleinian/orders.hpp"
#include "kleinian/zeta.hpp"

#ifndef KLEINIAN_VERSION
#define KLEINIAN_VERSION "unknown"
#endif

namespace kleinian::cli {

namespace {

using io::json;
using io::format_double;

struct Options {
  std::string group;
  std::string out = "kleinian";
  int max_word_length = 8;
  int max_k = 60;
  int band_limit = 256;
  int basis_size = 0;
  int quad_order = 32;
  double contour_radius = 0.0;
  double tol = 1e-13;
  std::uint64_t seed = 0;
  int threads = 1;
  std::string delta_hat;
  double margin = 0.05;
  // zeta
  std::string from = "0.5";
  std::string to = "3";
  int points = 20;
  int grid_points = 1;
  // ladder
  std::vector<std::string> s_values;
  int terms = 40;
  // scatter, orders
  std::string lambda = "0.5i";
  std::vector<std::string> lambdas;
};

class Run {
 public:
  Run(const Options& o, std::string command, std::ostream& out) : opt_(o), command_(std::move(command)), out_(out) {}

  void execute() {
    if (opt_.max_word_length < 1 || opt_.max_k < 1 || opt_.band_limit < 1 || opt_.quad_order < 8 || opt_.points < 1 ||
        opt_.grid_points < 1 || opt_.terms < 1)
      throw config_error("lengths and counts must be >= 1 (quad-order >= 8)");
    if (!(opt_.tol > 0) || opt_.contour_radius < 0 || !(opt_.margin > 0))
      throw config_error("tolerances, margin and contour radius must be positive");
    if (opt_.threads < 1) throw config_error("threads must be >= 1");
    set_num_threads(opt_.threads);
    if (opt_.group.empty()) throw config_error("--group is required");
    file_ = io::load_group(opt_.group);
    manifest_["group"] = file_.raw;
    if (command_ == "validate") validate_cmd();
    else if (command_ == "spectrum") spectrum_cmd();
    else if (command_ == "zeta") zeta_cmd();
    else if (command_ == "delta") delta_cmd();
    else if (command_ == "ladder") ladder_cmd();
    else if (command_ == "scatter") scatter_cmd();
    else if (command_ == "orders") orders_cmd();
    else if (command_ == "ps-measure") ps_cmd();
    else throw config_error("unknown command " + command_);
  }

  void write_manifest(const std::string& status, int code, const std::string& message) {
    manifest_["program"] = "kleinian";
    manifest_["version"] = KLEINIAN_VERSION;
    manifest_["command"] = command_;
    manifest_["config"] = config_json();
    manifest_["outputs"] = outputs_;
    manifest_["status"] = status;
    manifest_["exit_code"] = code;
    if (!message.empty()) manifest_["message"] = message;
    std::ofstream f(path("manifest.json"), std::ios::binary);
    if (f) f << manifest_.dump(2) << '\n';
  }

 private:
  std::string path(const std::string& suffix) const { return opt_.out + "." + suffix; }

  json config_json() const {
    json c;
    c["group"] = opt_.group;
    c["out"] = opt_.out;
    c["max_word_length"] = opt_.max_word_length;
    c["max_k"] = opt_.max_k;
    c["band_limit"] = opt_.band_limit;
    c["basis_size"] = opt_.basis_size;
    c["quad_order"] = opt_.quad_order;
    c["contour_radius"] = opt_.contour_radius;
    c["tol"] = opt_.tol;
    c["seed"] = opt_.seed;
    c["margin"] = opt_.margin;
    if (!opt_.delta_hat.empty()) c["delta_hat"] = opt_.delta_hat;
    if (command_ == "zeta") {
      c["from"] = opt_.from;
      c["to"] = opt_.to;
      c["points"] = opt_.points;
      c["grid_points"] = opt_.grid_points;
    }
    if (command_ == "ladder") {
      c["s"] = opt_.s_values;
      c["terms"] = opt_.terms;
    }
    if (command_ == "scatter") c["lambda"] = opt_.lambda;
    if (command_ == "orders") c["lambda"] = opt_.lambdas;
    return c;
  }

  void write(const std::string& suffix, const std::string& content) {
    const std::filesystem::path p(path(suffix));
    std::ofstream f(p, std::ios::binary);
    if (!f) throw config_error("cannot write " + p.string());
    f << content;
    outputs_.push_back(p.string());
  }

  void write_json(const std::string& suffix, const json& j) { write(suffix, j.dump(2) + "\n"); }

  double delta_hat() {
    if (delta_) return *delta_;
    if (!opt_.delta_hat.empty()) {
      delta_ = io::parse_complex(opt_.delta_hat).real();
      manifest_["delta_hat_source"] = "option";
    } else if (file_.delta_hat) {
      delta_ = *file_.delta_hat;
      manifest_["delta_hat_source"] = "group file";
    } else {
      delta_ = delta_estimate(file_.group, opt_.max_word_length).delta;
      manifest_["delta_hat_source"] = "estimate at max_word_length";
    }
    manifest_["delta_hat"] = *delta_;
    return *delta_;
  }

  ZetaParams zeta_params() {
    ZetaParams p;
    p.max_word_len = opt_.max_word_length;
    p.max_sym_power = opt_.max_k;
    p.tail_tol = opt_.tol;
    p.delta_hat = delta_hat();
    p.margin = opt_.margin;
    return p;
  }

  GeometryPtr geometry() {
    if (!geo_) geo_ = quotient_geometry(file_.group);
    return geo_;
  }

  int basis() {
    if (opt_.basis_size > 0) return opt_.basis_size;
    return 11 * static_cast<int>(geometry()->circles.size());
  }

  ScatterOptions scatter_options() {
    ScatterOptions so;
    so.delta_hat = delta_hat();
    so.margin = opt_.margin;
    so.tol = opt_.tol;
    return so;
  }

  void validate_cmd() {
    const ValidationReport r = validate(file_.group);
    json j;
    j["n"] = file_.group.n;
    j["rank"] = file_.group.rank();
    j["q"] = r.q;
    j["min_separation"] = r.min_separation;
    j["samples_per_disk"] = r.samples_per_disk;
    write_json("validate.json", j);
    out_ << "valid Schottky group: n = " << file_.group.n << ", rank = " << file_.group.rank()
         << ", q = " << format_double(r.q) << "\n";
  }

  void spectrum_cmd() {
    const LengthSpectrum spec = length_spectrum(file_.group, opt_.max_word_length);
    std::ostringstream os;
    io::CsvWriter csv(os);
    csv.row({"word", "l_g", "angles", "multiplicity"});
    for (const ConjugacyClass& c : spec.classes) {
      std::string angles;
      for (double a : c.class_data->angles) angles += (angles.empty() ? "" : ";") + format_double(a);
      csv.row({word_to_string(c.cyclic_word), format_double(c.class_data->length), angles, std::to_string(c.multiplicity)});
    }
    write("spectrum.csv", os.str());
    out_ << spec.classes.size() << " classes up to word length " << opt_.max_word_length << "\n";
  }

  void zeta_cmd() {
    const ZetaParams p = zeta_params();
    const LengthSpectrum spec = length_spectrum(file_.group, opt_.max_word_length);
    const cplx a = io::parse_complex(opt_.from), b = io::parse_complex(opt_.to);
    std::vector<cplx> pts;
    auto lin = [](double x, double y, int k, int n) { return n == 1 ? x : x + (y - x) * k / (n - 1); };
    if (opt_.grid_points > 1) {
      for (int i = 0; i < opt_.points; ++i)
        for (int j = 0; j < opt_.grid_points; ++j)
          pts.emplace_back(lin(a.real(), b.real(), i, opt_.points), lin(a.imag(), b.imag(), j, opt_.grid_points));
    } else {
      for (int i = 0; i < opt_.points; ++i) pts.push_back(opt_.points == 1 ? a : a + (b - a) * (double(i) / (opt_.points - 1)));
    }
    std::ostringstream os;
    io::CsvWriter csv(os);
    csv.row({"re_s", "im_s", "re_log_z", "im_log_z", "tail_bound"});
    for (cplx s : pts) {
      const ZetaValue v = zeta_log(spec, s, p);
      csv.row({format_double(s.real()), format_double(s.imag()), format_double(v.log_z.real()),
               format_double(v.log_z.imag()), format_double(v.tail_bound)});
    }
    write("zeta.csv", os.str());
    out_ << pts.size() << " zeta samples\n";
  }

  void delta_cmd() {
    const DeltaEstimate d = delta_estimate(file_.group, opt_.max_word_length);
    json j;
    j["delta"] = d.delta;
    j["uncertainty"] = d.uncertainty;
    j["window"] = json::array({d.window_lo, d.window_hi});
    j["orbit_size"] = d.orbit_size;
    write_json("delta.json", j);
    out_ << "delta_hat = " << format_double(d.delta) << " +- " << format_double(d.uncertainty) << "\n";
  }

  void ladder_cmd() {
    const ZetaParams p = zeta_params();
    std::vector<cplx> svals;
    for (const std::string& s : opt_.s_values) svals.push_back(io::parse_complex(s));
    if (svals.empty()) svals.push_back(*p.delta_hat + 0.5);
    std::ostringstream os;
    io::CsvWriter csv(os);
    csv.row({"re_s", "im_s", "terms", "re_lhs", "im_lhs", "re_rhs", "im_rhs", "discrepancy", "tail_bound"});
    double worst = 0.0;
    for (cplx s : svals) {
      const LadderResult r = ladder_check(file_.group, s, opt_.terms, p);
      worst = std::max(worst, r.discrepancy);
      csv.row({format_double(s.real()), format_double(s.imag()), std::to_string(opt_.terms), format_double(r.lhs.real()),
               format_double(r.lhs.imag()), format_double(r.rhs.real()), format_double(r.rhs.imag()),
               format_double(r.discrepancy), format_double(r.tail_bound)});
    }
    write("ladder.csv", os.str());
    out_ << "max ladder discrepancy " << format_double(worst) << "\n";
  }

  void scatter_cmd() {
    const cplx lambda = io::parse_complex(opt_.lambda);
    const ScatterOptions so = scatter_options();
    const int B = basis();
    const ScatteringData S = scattering(lambda, geometry(), B, opt_.max_word_length, so);
    const ScatteringData Sm = scattering(-lambda, geometry(), B, opt_.max_word_length, so);
    const CMat I = CMat::Identity(B, B);
    json j;
    j["lambda"] = io::complex_json(lambda);
    j["basis_size"] = B;
    j["continued"] = S.continued;
    j["tail_bound"] = S.tail_bound;
    j["components"] = S.components;
    j["functional_equation_residual"] = (S.matrix * Sm.matrix - I).norm();
    if (lambda.real() == 0.0) j["unitarity_residual"] = (S.matrix * S.matrix.adjoint() - I).norm();
    std::ostringstream os;
    io::CsvWriter csv(os);
    csv.row({"row", "col", "re", "im"});
    for (int r = 0; r < B; ++r)
      for (int c = 0; c < B; ++c)
        csv.row({std::to_string(r), std::to_string(c), format_double(S.matrix(r, c).real()), format_double(S.matrix(r, c).imag())});
    write("scatter.csv", os.str());
    write_json("scatter.json", j);
    out_ << "||S(l) S(-l) - I|| = " << format_double(j["functional_equation_residual"].get<double>()) << "\n";
  }

  void orders_cmd() {
    if (opt_.lambdas.empty()) throw config_error("orders: at least one --lambda is required");
    const ScatterOptions so = scatter_options();
    OrderInputs in;
    in.n = file_.group.n;
    in.rank = file_.group.rank();
    in.delta_hat = delta_hat();
    in.counting_family = funnel_normalized_scattering(geometry(), basis(), opt_.max_word_length, so);
    in.scattering_at_zero = normalized_scattering_at_zero(geometry(), basis(), opt_.max_word_length, so);
    in.contour.nodes = opt_.quad_order;
    in.contour.radius = opt_.contour_radius > 0 ? opt_.contour_radius : 0.05;
    json reports = json::array();
    std::ostringstream os;
    io::CsvWriter csv(os);
    csv.row({"index", "re_lambda", "im_lambda", "re_mu", "im_mu", "re_det", "im_det"});
    for (std::size_t i = 0; i < opt_.lambdas.size(); ++i) {
      const OrderReport r = zeta_order(io::parse_complex(opt_.lambdas[i]), in);
      json j;
      j["lambda"] = io::complex_json(r.lambda);
      j["regime"] = r.regime;
      j["order"] = r.order ? json(*r.order) : json(nullptr);
      j["contributions"] = {{"scattering_count", r.scattering_count},
                            {"finite_dim_term", r.finite_dim_term},
                            {"point_spectrum_term", r.point_spectrum_term ? json(*r.point_spectrum_term) : json(nullptr)}};
      j["non_integrality"] = r.non_integrality;
      j["caveat"] = r.caveat;
      reports.push_back(j);
      for (std::size_t k = 0; k < r.trace_nodes.size(); ++k)
        csv.row({std::to_string(i), format_double(r.lambda.real()), format_double(r.lambda.imag()),
                 format_double(r.trace_nodes[k].real()), format_double(r.trace_nodes[k].imag()),
                 format_double(r.trace_dets[k].real()), format_double(r.trace_dets[k].imag())});
      out_ << "order at " << io::format_complex(r.lambda) << ": " << (r.order ? std::to_string(*r.order) : "unavailable")
           << "\n";
    }
    write_json("orders.json", json{{"reports", reports}});
    write("orders_trace.csv", os.str());
  }

  void ps_cmd() {
    PSOptions po;
    po.basis_size = opt_.basis_size;
    po.max_len = opt_.max_word_length;
    po.fourier_modes = opt_.band_limit;
    po.delta_hat = delta_hat();
    po.radius = opt_.contour_radius > 0 ? opt_.contour_radius : 0.1;
    po.nodes = opt_.quad_order;
    po.scatter = scatter_options();
    const PSResult r = patterson_sullivan(geometry(), po);
    json j;
    j["center"] = io::complex_json(r.center);
    j["pole_order"] = r.pole_order;
    j["total_mass"] = io::complex_json(r.total_mass);
    j["outside_fraction"] = r.outside_fraction;
    j["fourier_modes"] = opt_.band_limit;
    write_json("ps.json", j);
    std::ostringstream os;
    io::CsvWriter csv(os);
    csv.row({"k", "re", "im"});
    for (Eigen::Index i = 0; i < r.fourier.size(); ++i)
      csv.row({std::to_string(i - opt_.band_limit), format_double(r.fourier(i).real()), format_double(r.fourier(i).imag())});
    write("ps.csv", os.str());
    out_ << "pole order " << r.pole_order << " at " << io::format_complex(r.center) << ", mass "
         << io::format_complex(r.total_mass) << "\n";
  }

  const Options& opt_;
  std::string command_;
  std::ostream& out_;
  io::GroupFile file_;
  std::optional<double> delta_;
  GeometryPtr geo_;
  json manifest_ = json::object();
  std::vector<std::string> outputs_;
};

int exit_code(ErrorKind k) {
  switch (k) {
    case ErrorKind::config: return 2;
    case ErrorKind::precondition: return 3;
    case ErrorKind::numerical: return 4;
  }
  return 4;
}

const char* kind_name(int code) {
  return code == 2 ? "config" : code == 3 ? "precondition" : "numerical";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Selberg zeta, scattering and order computations for Schottky groups", "kleinian"};
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  auto env = [](CLI::Option* opt, const char* name) { opt->envname(std::string("KLEINIAN_") + name); };
  env(app.add_option("--group", o.group, "group definition file (JSON)"), "GROUP");
  env(app.add_option("--max-word-length", o.max_word_length, "word length cutoff L"), "MAX_WORD_LENGTH");
  env(app.add_option("--max-k", o.max_k, "symmetric power cap K"), "MAX_K");
  env(app.add_option("--band-limit", o.band_limit, "Fourier modes of the Patterson-Sullivan residue"), "BAND_LIMIT");
  env(app.add_option("--basis-size", o.basis_size, "quotient basis size (0: 11 modes per circle)"), "BASIS_SIZE");
  env(app.add_option("--quad-order", o.quad_order, "contour nodes"), "QUAD_ORDER");
  env(app.add_option("--contour-radius", o.contour_radius, "contour radius (0: command default)"), "CONTOUR_RADIUS");
  env(app.add_option("--tol", o.tol, "truncation tolerance"), "TOL");
  env(app.add_option("--out", o.out, "output path prefix"), "OUT");
  env(app.add_option("--seed", o.seed, "sampling seed (recorded in the manifest)"), "SEED");
  env(app.add_option("--threads", o.threads, "worker threads"), "THREADS");
  env(app.add_option("--delta-hat", o.delta_hat, "critical exponent estimate (default: group file, else estimated)"),
      "DELTA_HAT");
  env(app.add_option("--margin", o.margin, "convergence margin above delta_hat"), "MARGIN");

  app.add_subcommand("validate", "Schottky validation report");
  app.add_subcommand("spectrum", "primitive length spectrum (CSV)");
  CLI::App* zeta = app.add_subcommand("zeta", "log Z along a line or grid in s (CSV)");
  zeta->add_option("--from", o.from, "first point");
  zeta->add_option("--to", o.to, "last point");
  zeta->add_option("--points", o.points, "points along the line (or real-axis grid size)");
  zeta->add_option("--grid-points", o.grid_points, "imaginary-axis grid size (1: a line)");
  app.add_subcommand("delta", "critical exponent estimate");
  CLI::App* ladder = app.add_subcommand("ladder", "dimension ladder discrepancy table (CSV)");
  ladder->add_option("--s", o.s_values, "points s (default delta_hat + 1/2)");
  ladder->add_option("--terms", o.terms, "ladder terms J");
  CLI::App* scatter = app.add_subcommand("scatter", "scattering matrix and its residuals");
  scatter->add_option("--lambda", o.lambda, "spectral parameter");
  CLI::App* orders = app.add_subcommand("orders", "zeta order reports (JSON)");
  orders->add_option("--lambda", o.lambdas, "spectral parameters")->take_all();
  app.add_subcommand("ps-measure", "Patterson-Sullivan residue");

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e, out, err);
    err << json{{"error", "config"}, {"message", e.what()}, {"exit_code", 2}}.dump() << "\n";
    return 2;
  }
  const std::string command = app.get_subcommands().front()->get_name();
  if (const auto parent = std::filesystem::path(o.out).parent_path(); !parent.empty())
    std::filesystem::create_directories(parent);

  Run run(o, command, out);
  int code = 0;
  std::string message;
  try {
    run.execute();
  } catch (const Error& e) {
    code = exit_code(e.kind());
    message = e.what();
  } catch (const std::exception& e) {
    code = 4;
    message = e.what();
  }
  run.write_manifest(code == 0 ? "ok" : "error", code, message);
  if (code != 0) {
    json j{{"error", kind_name(code)}, {"message", message}, {"exit_code", code}, {"command", command}};
    err << j.dump() << "\n";
  }
  return code;
}

}  // namespace kleinian::cli
