#include "priorsense/io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <json.hpp>

namespace priorsense {

using nlohmann::json;

std::string instance_to_json(const InstanceBundle& bundle) {
  json doc;
  doc["K"] = bundle.space.action_count();
  json models = json::array();
  for (const auto& m : bundle.space.models()) {
    json actions = json::array();
    for (const auto& d : m.per_action()) {
      actions.push_back({{"support", std::vector<double>(d.support().begin(), d.support().end())},
                         {"probs", std::vector<double>(d.probs().begin(), d.probs().end())}});
    }
    models.push_back({{"actions", std::move(actions)}});
  }
  doc["models"] = std::move(models);
  doc["prior"] = std::vector<double>(bundle.prior.mass().begin(), bundle.prior.mass().end());
  doc["true_model"] = bundle.true_model;
  doc["delta"] = bundle.delta;
  return doc.dump(2);
}

InstanceBundle instance_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw std::invalid_argument(fmt::format("instance JSON: {}", e.what()));
  }
  try {
    const auto k = doc.at("K").get<std::size_t>();
    std::vector<Model> models;
    for (const auto& jm : doc.at("models")) {
      std::vector<RewardDistribution> laws;
      for (const auto& ja : jm.at("actions")) {
        laws.emplace_back(ja.at("support").get<std::vector<double>>(), ja.at("probs").get<std::vector<double>>());
      }
      if (laws.size() != k) throw std::invalid_argument("instance JSON: model action count differs from K");
      models.emplace_back(std::move(laws));
    }
    InstanceBundle bundle;
    bundle.space = ModelSpace(std::move(models));
    bundle.prior = BeliefState(doc.at("prior").get<std::vector<double>>());
    bundle.true_model = doc.value("true_model", std::size_t{0});
    bundle.delta = doc.value("delta", 0.0);
    validate(bundle);
    return bundle;
  } catch (const json::exception& e) {
    throw std::invalid_argument(fmt::format("instance JSON: {}", e.what()));
  }
}

ExperimentConfig config_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
    const auto which = parse_prior_case(doc.value("case", std::string("poor")));
    auto c = ExperimentConfig::defaults(which);
    if (doc.contains("N_list")) c.n_list = doc["N_list"].get<std::vector<std::size_t>>();
    if (doc.contains("p_list")) c.p_list = doc["p_list"].get<std::vector<double>>();
    c.delta = doc.value("delta", c.delta);
    c.horizon = doc.value("T", c.horizon);
    c.runs = doc.value("runs", c.runs);
    c.master_seed = doc.value("master_seed", c.master_seed);
    c.out_dir = doc.value("out_dir", c.out_dir);
    c.fit_min_p = doc.value("fit_min_p", c.fit_min_p);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw std::invalid_argument(fmt::format("config JSON: {}", e.what()));
  }
}

std::string format_double(double v) { return fmt::format("{:.17g}", v); }

void write_trajectory_csv(std::ostream& out, const Trajectory& traj) {
  out << "t,action,reward,gap,p_theta1\n";
  for (std::size_t t = 0; t < traj.steps.size(); ++t) {
    const auto& s = traj.steps[t];
    out << (t + 1) << ',' << s.action << ',' << format_double(s.reward) << ',' << format_double(s.gap) << ',';
    if (t < traj.posterior.size()) out << format_double(traj.posterior[t][0]);
    out << '\n';
  }
}

void write_summary_csv(std::ostream& out, std::span<const SummaryRow> rows) {
  out << "instance_id,p,N,T,runs,mean_regret,std_error\n";
  for (const auto& r : rows) {
    out << r.instance_id << ',' << format_double(r.p) << ',' << r.n_models << ',' << r.horizon << ','
        << r.runs << ',' << format_double(r.mean_regret) << ',' << format_double(r.std_error) << '\n';
  }
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream ss(line);
  while (std::getline(ss, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

std::vector<SummaryRow> read_summary_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "instance_id,p,N,T,runs,mean_regret,std_error") {
    throw std::invalid_argument("summary CSV: unexpected header");
  }
  std::vector<SummaryRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c = split_csv_line(line);
    if (c.size() != 7) throw std::invalid_argument(fmt::format("summary CSV: malformed row '{}'", line));
    rows.push_back({c[0], std::stod(c[1]), std::stoul(c[2]), std::stoll(c[3]), std::stoul(c[4]),
                    std::stod(c[5]), std::stod(c[6])});
  }
  return rows;
}

void write_fit_csv(std::ostream& out, PriorCase which, std::span<const ScalingFit> fits) {
  out << "case,N,points,slope,intercept,r_squared\n";
  for (const auto& f : fits) {
    out << to_string(which) << ',' << f.n_models << ',' << f.points << ',';
    if (f.fit) {
      out << format_double(f.fit->slope) << ',' << format_double(f.fit->intercept) << ','
          << format_double(f.fit->r_squared);
    } else {
      out << "insufficient points,,";
    }
    out << '\n';
  }
}

namespace {

constexpr double kPanelWidth = 480.0;
constexpr double kPanelHeight = 360.0;
constexpr double kLeft = 60.0, kRight = 20.0, kTop = 40.0, kBottom = 50.0;
constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

void render_panel(std::ostringstream& svg, double x0, const ScalingResult* result, PriorCase which) {
  const char* xlabel = which == PriorCase::Poor ? "sqrt(1/p)" : "sqrt(1-p)";
  svg << fmt::format("<g transform=\"translate({:.1f},0)\">\n", x0);
  svg << fmt::format("<text x=\"{:.1f}\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">{} prior</text>\n",
                     kPanelWidth / 2, to_string(which));
  const double pw = kPanelWidth - kLeft - kRight;
  const double ph = kPanelHeight - kTop - kBottom;
  svg << fmt::format("<rect x=\"{:.1f}\" y=\"{:.1f}\" width=\"{:.1f}\" height=\"{:.1f}\" fill=\"none\" stroke=\"#333\"/>\n",
                     kLeft, kTop, pw, ph);
  svg << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"12\">{}</text>\n",
                     kLeft + pw / 2, kPanelHeight - 10, xlabel);
  svg << fmt::format(
      "<text transform=\"translate(16,{:.1f}) rotate(-90)\" text-anchor=\"middle\" font-size=\"12\">mean cumulative regret</text>\n",
      kTop + ph / 2);
  if (result == nullptr || result->rows.empty()) {
    svg << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"12\" fill=\"#888\">no data</text>\n</g>\n",
                       kLeft + pw / 2, kTop + ph / 2);
    return;
  }

  double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
  double ymin = 0.0, ymax = -std::numeric_limits<double>::infinity();
  for (const auto& r : result->rows) {
    const double x = scaling_x(which, r.p);
    xmin = std::min(xmin, x);
    xmax = std::max(xmax, x);
    ymin = std::min(ymin, r.mean_regret - r.std_error);
    ymax = std::max(ymax, r.mean_regret + r.std_error);
  }
  if (xmax == xmin) {
    xmin -= 0.5;
    xmax += 0.5;
  }
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const double xpad = 0.05 * (xmax - xmin);
  xmin -= xpad;
  xmax += xpad;
  ymax += 0.05 * (ymax - ymin);
  auto sx = [&](double x) { return kLeft + (x - xmin) / (xmax - xmin) * pw; };
  auto sy = [&](double y) { return kTop + ph - (y - ymin) / (ymax - ymin) * ph; };

  for (int i = 0; i <= 4; ++i) {
    const double xv = xmin + (xmax - xmin) * i / 4.0;
    const double yv = ymin + (ymax - ymin) * i / 4.0;
    svg << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"middle\" font-size=\"10\">{:.3g}</text>\n",
                       sx(xv), kTop + ph + 14, xv);
    svg << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" text-anchor=\"end\" font-size=\"10\">{:.3g}</text>\n",
                       kLeft - 4, sy(yv) + 3, yv);
  }

  std::map<std::size_t, std::vector<const SummaryRow*>> by_n;
  for (const auto& r : result->rows) by_n[r.n_models].push_back(&r);
  std::size_t color = 0;
  for (const auto& [n, rows] : by_n) {
    const char* c = kPalette[color++ % std::size(kPalette)];
    for (const auto* r : rows) {
      const double x = sx(scaling_x(which, r->p));
      svg << fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"{3}\"/>\n", x,
                         sy(r->mean_regret - r->std_error), sy(r->mean_regret + r->std_error), c);
      svg << fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n", x, sy(r->mean_regret), c);
    }
    for (const auto& f : result->fits) {
      if (f.n_models != n || !f.fit) continue;
      const double y0 = f.fit->intercept + f.fit->slope * xmin;
      const double y1 = f.fit->intercept + f.fit->slope * xmax;
      svg << fmt::format(
          "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"{}\" stroke-dasharray=\"4 3\"/>\n",
          sx(xmin), sy(y0), sx(xmax), sy(y1), c);
      svg << fmt::format("<text x=\"{:.1f}\" y=\"{:.1f}\" font-size=\"11\" fill=\"{}\">N={} R2={:.3f}</text>\n",
                         kLeft + 8, kTop + 14 + 14.0 * static_cast<double>(color - 1), c, n, f.fit->r_squared);
    }
  }
  svg << "</g>\n";
}

}  // namespace

std::string render_scaling_svg(const ScalingResult* poor, const ScalingResult* good) {
  std::ostringstream svg;
  svg << fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0:.0f}\" height=\"{1:.0f}\" viewBox=\"0 0 {0:.0f} {1:.0f}\" font-family=\"sans-serif\">\n",
      2 * kPanelWidth, kPanelHeight);
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  render_panel(svg, 0.0, poor, PriorCase::Poor);
  render_panel(svg, kPanelWidth, good, PriorCase::Good);
  svg << "</svg>\n";
  return svg.str();
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error(fmt::format("cannot open '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error(fmt::format("cannot write '{}'", path));
  out << contents;
}

}  // namespace priorsense
