#pragma once

#include <algorithm>
#include <cstdio>
#include <string>

#include "seprisk/interpret/ranking.hpp"
#include "seprisk/interpret/risk_curve.hpp"
#include "seprisk/tabular/csv.hpp"

namespace seprisk::interpret {

using tabular::format_number;

inline std::string risk_curve_csv(const RiskCurve& rc) {
  std::string out = "feature,run_id,grid_value,logodds_contribution,odds_factor\n";
  for (std::size_t r = 0; r < rc.contribution.size(); ++r)
    for (std::size_t i = 0; i < rc.grid.size(); ++i)
      out += rc.feature + "," + std::to_string(r + 1) + "," + format_number(rc.grid[i]) + "," +
             format_number(rc.contribution[r][i]) + "," + format_number(rc.odds_factor[r][i]) + "\n";
  return out;
}

inline std::string histogram_csv(const ClassHistograms& h) {
  std::string out = "bin_lo,bin_hi,density_survivor,density_nonsurvivor\n";
  for (std::size_t k = 0; k < h.survivor.size(); ++k)
    out += format_number(h.edges[k]) + "," + format_number(h.edges[k + 1]) + "," + format_number(h.survivor[k]) + "," +
           format_number(h.nonsurvivor[k]) + "\n";
  return out;
}

inline std::string ranking_csv(const FeatureRanking& ranking) {
  std::string out = "rank,feature,modality,weight\n";
  for (std::size_t i = 0; i < ranking.size(); ++i)
    out += std::to_string(i + 1) + "," + ranking[i].feature + "," + ranking[i].modality + "," +
           format_number(ranking[i].weight) + "\n";
  return out;
}

namespace detail {
inline std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}
}  // namespace detail

// Mean odds-factor curve with a +-1 sd band over the class histograms.
inline std::string risk_curve_svg(const RiskCurve& rc) {
  using detail::fmt;
  constexpr double W = 640, H = 400, L = 60, R = 20, T = 30, B = 50;
  const double x0 = rc.grid.front(), x1 = rc.grid.back() > x0 ? rc.grid.back() : x0 + 1.0;
  double ymax = 1.0;
  for (std::size_t i = 0; i < rc.grid.size(); ++i) ymax = std::max(ymax, rc.mean[i] + rc.sd[i]);
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - y / ymax * (H - T - B); };

  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"400\" viewBox=\"0 0 640 400\">\n";
  s += "<rect width=\"640\" height=\"400\" fill=\"white\"/>\n";
  const auto& h = rc.histograms;
  double hmax = 0.0;
  for (std::size_t k = 0; k < h.survivor.size(); ++k) hmax = std::max({hmax, h.survivor[k], h.nonsurvivor[k]});
  if (hmax > 0.0) {
    const double band = 0.35 * (H - T - B);
    auto bars = [&](const std::vector<double>& d, const char* colour) {
      for (std::size_t k = 0; k < d.size(); ++k) {
        const double a = px(std::clamp(h.edges[k], x0, x1)), b = px(std::clamp(h.edges[k + 1], x0, x1));
        const double ht = d[k] / hmax * band;
        s += "<rect x=\"" + fmt(a) + "\" y=\"" + fmt(H - B - ht) + "\" width=\"" + fmt(std::max(b - a, 0.0)) +
             "\" height=\"" + fmt(ht) + "\" fill=\"" + colour + "\" fill-opacity=\"0.35\"/>\n";
      }
    };
    bars(h.survivor, "#7fc97f");
    bars(h.nonsurvivor, "#f0027f");
  }
  std::string band = "<polygon fill=\"#386cb0\" fill-opacity=\"0.2\" points=\"";
  for (std::size_t i = 0; i < rc.grid.size(); ++i) band += fmt(px(rc.grid[i])) + "," + fmt(py(rc.mean[i] + rc.sd[i])) + " ";
  for (std::size_t i = rc.grid.size(); i-- > 0;)
    band += fmt(px(rc.grid[i])) + "," + fmt(py(std::max(rc.mean[i] - rc.sd[i], 0.0))) + " ";
  s += band + "\"/>\n<polyline fill=\"none\" stroke=\"#386cb0\" stroke-width=\"2\" points=\"";
  for (std::size_t i = 0; i < rc.grid.size(); ++i) s += fmt(px(rc.grid[i])) + "," + fmt(py(rc.mean[i])) + " ";
  s += "\"/>\n";
  s += "<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(H - B) + "\" x2=\"" + fmt(W - R) + "\" y2=\"" + fmt(H - B) +
       "\" stroke=\"black\"/>\n<line x1=\"" + fmt(L) + "\" y1=\"" + fmt(T) + "\" x2=\"" + fmt(L) + "\" y2=\"" +
       fmt(H - B) + "\" stroke=\"black\"/>\n";
  s += "<text x=\"" + fmt(L) + "\" y=\"" + fmt(H - 15) + "\" font-size=\"12\">" + format_number(x0) + "</text>\n";
  s += "<text x=\"" + fmt(W - R) + "\" y=\"" + fmt(H - 15) + "\" font-size=\"12\" text-anchor=\"end\">" +
       format_number(rc.grid.back()) + "</text>\n";
  s += "<text x=\"" + fmt(W / 2) + "\" y=\"" + fmt(H - 15) + "\" font-size=\"13\" text-anchor=\"middle\">" + rc.feature +
       "</text>\n";
  s += "<text x=\"10\" y=\"" + fmt(T - 10) + "\" font-size=\"12\">odds factor (max " + fmt(ymax) + ")</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace seprisk::interpret
