#include "odoflow/reports.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace odoflow {

namespace {

const char* variant_name(ClaimVariant v) {
  return v == ClaimVariant::Corrected ? "corrected" : "printed";
}

const char* bool_name(bool b) { return b ? "true" : "false"; }

}  // namespace

std::string csv_kvalues(int max_n) {
  std::ostringstream out;
  out << "n,K_n\n";
  for (int n = 4; n <= max_n; ++n) out << n << ',' << int_str(k_value(n)) << '\n';
  return out.str();
}

std::string csv_violations(const std::vector<ViolationRecord>& rows) {
  std::ostringstream out;
  out << "prefix,k,n,variant,expected_index,expected_value,observed_value\n";
  for (const auto& r : rows)
    out << prefix_str(r.prefix) << ',' << r.k << ',' << r.n << ','
        << variant_name(r.variant) << ',' << r.expected_index << ','
        << r.expected_value << ',' << r.observed_value << '\n';
  return out.str();
}

std::string csv_bounds(const std::vector<BoundRow>& rows) {
  std::ostringstream out;
  out << "n,m,forward,backward,corrected_bound,printed_bound,"
         "forward_ok_corrected,forward_ok_printed\n";
  for (const auto& r : rows)
    out << r.n << ',' << r.m << ',' << rat_str(r.forward_measure) << ','
        << rat_str(r.backward_measure) << ',' << rat_str(r.corrected_bound)
        << ',' << rat_str(r.printed_bound) << ','
        << bool_name(r.forward_ok_corrected) << ','
        << bool_name(r.forward_ok_printed) << '\n';
  return out.str();
}

std::string csv_decay(const std::vector<DecayRow>& rows) {
  std::ostringstream out;
  out << "label,lo,hi,forward,backward,union,envelope\n";
  for (const auto& r : rows)
    out << r.label << ',' << rat_str(r.lo) << ',' << rat_str(r.hi) << ','
        << rat_str(r.forward_measure) << ',' << rat_str(r.backward_measure)
        << ',' << rat_str(r.union_measure) << ',' << rat_str(r.envelope)
        << '\n';
  return out.str();
}

namespace {

std::string fmt2(double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

}  // namespace

std::string svg_decay(const std::vector<DecayRow>& rows) {
  // Fixed layout; log2(measure) on y, one column per row. Doubles are
  // presentation only (the exact values live in the CSV).
  const double left = 70, top = 20, bottom = 40, step_x = 56;
  const double plot_h = 280;
  const double width = left + step_x * static_cast<double>(rows.size()) + 30;
  const double height = top + plot_h + bottom;

  double y_min = -1, y_max = 0;  // log2 range, measures are <= 1
  auto lg = [](const Rat& r) { return std::log2(r.get_d()); };
  for (const auto& r : rows) {
    for (const Rat* m : {&r.forward_measure, &r.backward_measure,
                         &r.union_measure, &r.envelope})
      if (*m > 0) y_min = std::min(y_min, lg(*m));
  }
  y_min = std::floor(y_min) - 1;  // the floor line marks "zero / below range"

  auto x_of = [&](std::size_t i) {
    return left + step_x * (static_cast<double>(i) + 0.5);
  };
  auto y_of = [&](double lv) {
    return top + plot_h * (y_max - lv) / (y_max - y_min);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << fmt2(width)
      << "\" height=\"" << fmt2(height) << "\" viewBox=\"0 0 " << fmt2(width)
      << ' ' << fmt2(height) << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  // axes and horizontal grid at integer log2 levels
  for (double lv = y_max; lv >= y_min; lv -= 1) {
    const double y = y_of(lv);
    out << "<line x1=\"" << fmt2(left) << "\" y1=\"" << fmt2(y) << "\" x2=\""
        << fmt2(width - 20) << "\" y2=\"" << fmt2(y)
        << "\" stroke=\"#dddddd\"/>\n";
    out << "<text x=\"" << fmt2(left - 8) << "\" y=\"" << fmt2(y + 4)
        << "\" text-anchor=\"end\" font-size=\"11\">2^" << fmt2(lv)
        << "</text>\n";
  }
  // column labels
  for (std::size_t i = 0; i < rows.size(); ++i)
    out << "<text x=\"" << fmt2(x_of(i)) << "\" y=\""
        << fmt2(top + plot_h + 16) << "\" text-anchor=\"middle\" "
        << "font-size=\"11\">" << rows[i].label << "</text>\n";

  struct Series {
    const char* name;
    const char* color;
    const Rat DecayRow::* field;
  };
  const Series series[] = {
      {"forward", "#888888", &DecayRow::forward_measure},
      {"backward", "#bbbbbb", &DecayRow::backward_measure},
      {"union", "#1f4e9c", &DecayRow::union_measure},
      {"envelope", "#c03020", &DecayRow::envelope},
  };
  const double floor_y = y_of(y_min);
  for (const auto& s : series) {
    std::ostringstream pts;
    bool any = false;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      const Rat& m = rows[i].*(s.field);
      if (m > 0) {
        pts << fmt2(x_of(i)) << ',' << fmt2(y_of(lg(m))) << ' ';
        any = true;
      } else {
        // exact zero: tick on the floor line instead of a point off-scale
        out << "<line x1=\"" << fmt2(x_of(i) - 4) << "\" y1=\""
            << fmt2(floor_y) << "\" x2=\"" << fmt2(x_of(i) + 4) << "\" y2=\""
            << fmt2(floor_y) << "\" stroke=\"" << s.color
            << "\" stroke-width=\"3\"/>\n";
      }
    }
    if (any)
      out << "<polyline fill=\"none\" stroke=\"" << s.color
          << "\" stroke-width=\"1.5\" points=\"" << pts.str() << "\"/>\n";
  }
  // legend
  double ly = top + 8;
  for (const auto& s : series) {
    out << "<rect x=\"" << fmt2(width - 110) << "\" y=\"" << fmt2(ly - 8)
        << "\" width=\"10\" height=\"10\" fill=\"" << s.color << "\"/>\n"
        << "<text x=\"" << fmt2(width - 96) << "\" y=\"" << fmt2(ly + 1)
        << "\" font-size=\"11\">" << s.name << "</text>\n";
    ly += 16;
  }
  out << "</svg>\n";
  return out.str();
}

namespace {

nlohmann::json window_to_json(const Window& w) {
  nlohmann::json j{{"lo", rat_str(w.lo)},
                   {"hi", rat_str(w.hi)},
                   {"lo_open", w.lo_open},
                   {"hi_open", w.hi_open},
                   {"mirrored", w.mirrored}};
  if (w.provenance == WindowProvenance::FromLogScale) {
    j["provenance"] = "from_log_scale";
    j["s"] = rat_str(w.log_s);
    j["delta"] = rat_str(w.log_delta);
    j["precision_bits"] = w.precision_bits;
  } else {
    j["provenance"] = "direct";
  }
  return j;
}

nlohmann::json set_json(const CylinderSet& set) {
  return nlohmann::json::parse(set_to_json(set));
}

nlohmann::json direction_to_json(const DirectionalResult& r) {
  return {{"members", set_json(r.members)},
          {"measure", rat_str(r.measure)},
          {"undetermined_mass", rat_str(r.undetermined_mass)},
          {"boundary_mass", rat_str(r.boundary_mass)}};
}

nlohmann::json point_to_json(const FlowPoint& p) {
  return {{"base", p.base.sym}, {"height", rat_str(p.height)}};
}

}  // namespace

nlohmann::json report_to_json(const ReturnReport& report) {
  return {{"window", window_to_json(report.window)},
          {"base_measure", rat_str(report.base_measure)},
          {"forward", direction_to_json(report.forward)},
          {"backward", direction_to_json(report.backward)},
          {"union", direction_to_json(report.combined)}};
}

nlohmann::json report_to_json(const RectangleReport& report) {
  nlohmann::json fibers = nlohmann::json::array();
  for (const auto& f : report.fibers) {
    nlohmann::json pieces = nlohmann::json::array();
    for (const auto& p : f.covered.pieces())
      pieces.push_back({rat_str(p.first), rat_str(p.second)});
    fibers.push_back({{"base", f.base.sym},
                      {"covered", pieces},
                      {"undetermined", f.undetermined}});
  }
  return {{"band", {rat_str(report.band_lo), rat_str(report.band_hi)}},
          {"window", window_to_json(report.window)},
          {"measure", rat_str(report.measure)},
          {"undetermined_mass", rat_str(report.undetermined_mass)},
          {"fibers", fibers}};
}

nlohmann::json report_to_json(const PropAReport& report) {
  nlohmann::json j{{"window", window_to_json(report.window)},
                   {"set", set_json(report.set)},
                   {"measure", rat_str(report.measure)},
                   {"base_measure", rat_str(report.base_measure)}};
  if (report.eta) {
    j["eta"] = rat_str(*report.eta);
    j["exceeds_eta"] = *report.exceeds_eta;
  }
  return j;
}

nlohmann::json report_to_json(const ConjugacyReport& report) {
  return {{"original",
           {{"forward", rat_str(report.original_forward)},
            {"backward", rat_str(report.original_backward)},
            {"union", rat_str(report.original_union)}}},
          {"conjugated",
           {{"forward", rat_str(report.conjugated_forward)},
            {"backward", rat_str(report.conjugated_backward)},
            {"union", rat_str(report.conjugated_union)}}},
          {"equal", report.equal}};
}

nlohmann::json report_to_json(const WeightingReport& report) {
  return {{"base_measure", rat_str(report.base_measure)},
          {"weighted_measure", rat_str(report.weighted_measure)},
          {"max_density", rat_str(report.max_density)},
          {"dominated", report.dominated}};
}

nlohmann::json outcome_to_json(const FlowOutcome& outcome) {
  if (const auto* p = std::get_if<FlowPoint>(&outcome))
    return {{"reached", point_to_json(*p)}};
  const auto& stop = std::get<FlowStop>(outcome);
  return {{"stopped_at", point_to_json(stop.reached)},
          {"remaining", rat_str(stop.remaining)}};
}

nlohmann::json trace_to_json(const SumTrace& trace) {
  nlohmann::json sums = nlohmann::json::array();
  for (const Int& s : trace.sums) sums.push_back(int_str(s));
  const char* reason = nullptr;
  switch (trace.stop_reason) {
    case StopReason::HorizonExhausted: reason = "HorizonExhausted"; break;
    case StopReason::Overflow: reason = "Overflow"; break;
    case StopReason::Underflow: reason = "Underflow"; break;
    case StopReason::NeedsDepth: reason = "NeedsDepth"; break;
    case StopReason::LimitReached: reason = "LimitReached"; break;
  }
  return {{"direction",
           trace.direction == OrbitDirection::Forward ? "forward" : "backward"},
          {"sums", sums},
          {"stop_reason", reason}};
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  std::filesystem::path tmp = target;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed for " + tmp.string());
  }
  std::filesystem::rename(tmp, target);
}

}  // namespace odoflow
