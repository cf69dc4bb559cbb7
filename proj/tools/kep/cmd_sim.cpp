#include <algorithm>
#include <cmath>
#include <iomanip>
#include <map>
#include <sstream>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "common.hpp"
#include "kep/dynsim/dynsim.hpp"
#include "kep/error.hpp"

namespace kep::cli {

namespace {

struct Cell {
  double ratio_sum = 0;
  std::size_t reps = 0;

  double mean_pct() const { return 100 * ratio_sum / static_cast<double>(reps); }
};

using Grid = std::map<std::pair<double, double>, Cell>;

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream in(line);
  std::string field;
  while (std::getline(in, field, ',')) out.push_back(field);
  return out;
}

double number(const std::string& text, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "'" + text + "' is not a number");
  }
}

Grid read_grid(std::istream& in) {
  Grid grid;
  std::string line;
  std::size_t number_of_line = 0;
  std::vector<std::string> header;
  std::size_t col_arrival = 0, col_interval = 0, col_ratio = 0;
  while (std::getline(in, line)) {
    ++number_of_line;
    if (line.empty() || line.front() == '#') continue;
    const auto fields = split(line);
    if (header.empty()) {
      header = fields;
      auto find = [&](const char* name) {
        auto it = std::find(header.begin(), header.end(), name);
        if (it == header.end())
          throw ParseError(number_of_line, std::string("header lacks column '") + name + "'");
        return static_cast<std::size_t>(it - header.begin());
      };
      col_arrival = find("arrival_rate_days");
      col_interval = find("match_run_interval_days");
      col_ratio = find("ratio");
      continue;
    }
    if (fields.size() != header.size())
      throw ParseError(number_of_line, "expected " + std::to_string(header.size()) + " fields");
    auto& cell = grid[{number(fields[col_arrival], number_of_line),
                       number(fields[col_interval], number_of_line)}];
    cell.ratio_sum += number(fields[col_ratio], number_of_line);
    ++cell.reps;
  }
  if (grid.empty()) throw ParseError(0, "no result rows");
  return grid;
}

std::string fmt_num(double v) {
  std::ostringstream s;
  s << v;
  return s.str();
}

void write_table(std::ostream& out, const Grid& grid, const std::vector<double>& arrivals,
                 const std::vector<double>& intervals) {
  out << "arrival_rate_days";
  for (double m : intervals) out << ',' << fmt_num(m);
  out << '\n';
  for (double a : arrivals) {
    out << fmt_num(a);
    for (double m : intervals) {
      out << ',';
      if (auto it = grid.find({a, m}); it != grid.end())
        out << std::fixed << std::setprecision(2) << it->second.mean_pct() << std::defaultfloat;
    }
    out << '\n';
  }
}

void write_svg(std::ostream& out, const Grid& grid, const std::vector<double>& arrivals,
               const std::vector<double>& intervals) {
  const int cell_w = 70, cell_h = 36, left = 90, top = 60;
  const int width = left + cell_w * static_cast<int>(intervals.size()) + 20;
  const int height = top + cell_h * static_cast<int>(arrivals.size()) + 40;
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& [key, cell] : grid) {
    lo = std::min(lo, cell.mean_pct());
    hi = std::max(hi, cell.mean_pct());
  }
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<text x=\"" << left << "\" y=\"20\">greedy / conventional transplants (%)</text>\n";
  out << "<text x=\"" << left << "\" y=\"" << top - 22 << "\">match run interval (days)</text>\n";
  out << "<text x=\"10\" y=\"" << top - 8 << "\">arrival (days)</text>\n";
  for (std::size_t c = 0; c < intervals.size(); ++c)
    out << "<text x=\"" << left + c * cell_w + cell_w / 2 << "\" y=\"" << top - 6
        << "\" text-anchor=\"middle\">" << fmt_num(intervals[c]) << "</text>\n";
  for (std::size_t r = 0; r < arrivals.size(); ++r) {
    const int y = top + static_cast<int>(r) * cell_h;
    out << "<text x=\"" << left - 10 << "\" y=\"" << y + cell_h / 2 + 4
        << "\" text-anchor=\"end\">" << fmt_num(arrivals[r]) << "</text>\n";
    for (std::size_t c = 0; c < intervals.size(); ++c) {
      const int x = left + static_cast<int>(c) * cell_w;
      auto it = grid.find({arrivals[r], intervals[c]});
      if (it == grid.end()) {
        out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_w << "\" height=\""
            << cell_h << "\" fill=\"#eeeeee\" stroke=\"white\"/>\n";
        continue;
      }
      const double v = it->second.mean_pct();
      const double t = hi > lo ? (v - lo) / (hi - lo) : 1.0;
      // White to dark blue.
      const int red = static_cast<int>(std::lround(255 - 215 * t));
      const int green = static_cast<int>(std::lround(255 - 165 * t));
      const int blue = static_cast<int>(std::lround(255 - 75 * t));
      out << "<rect x=\"" << x << "\" y=\"" << y << "\" width=\"" << cell_w << "\" height=\""
          << cell_h << "\" fill=\"rgb(" << red << ',' << green << ',' << blue
          << ")\" stroke=\"white\"/>\n";
      out << "<text x=\"" << x + cell_w / 2 << "\" y=\"" << y + cell_h / 2 + 4
          << "\" text-anchor=\"middle\" fill=\"" << (t > 0.6 ? "white" : "black") << "\">"
          << std::fixed << std::setprecision(1) << v << std::defaultfloat << "</text>\n";
    }
  }
  out << "</svg>\n";
}

}  // namespace

void add_simulate(CLI::App& app) {
  struct Opts {
    std::string config;
    std::string out = "-";
    unsigned threads = 0;
    std::optional<std::size_t> reps;
    std::optional<std::uint64_t> seed;
    std::optional<double> horizon;
    std::vector<double> arrivals;
    std::vector<double> intervals;
    std::string write_config;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand(
      "simulate", "Compare greedy and conventional matching in the dynamic pool simulation");
  cmd->add_option("-c,--config", opts->config, "Simulation config (JSON)")->check(CLI::ExistingFile);
  cmd->add_option("-o,--out", opts->out, "Output CSV");
  cmd->add_option("--threads", opts->threads, "Worker threads (0 = all cores)");
  cmd->add_option("--reps", opts->reps, "Repetitions per cell")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", opts->seed, "Base seed");
  cmd->add_option("--horizon", opts->horizon, "Simulated days")->check(CLI::PositiveNumber);
  cmd->add_option("--arrival", opts->arrivals, "Arrival rates of the grid (days)")->delimiter(',');
  cmd->add_option("--interval", opts->intervals, "Match run intervals of the grid (days)")
      ->delimiter(',');
  cmd->add_option("--write-config", opts->write_config,
                  "Write the effective config to this file and exit");
  cmd->callback([opts] {
    dynsim::SimConfig config;
    if (!opts->config.empty()) config = dynsim::read_config(*open_in(opts->config));
    if (opts->reps) config.repetitions = *opts->reps;
    if (opts->seed) config.seed = *opts->seed;
    if (opts->horizon) config.horizon_days = *opts->horizon;
    config.validate();
    if (!opts->write_config.empty()) {
      dynsim::write_config(*open_out(opts->write_config), config);
      return;
    }
    dynsim::Grid grid;
    if (!opts->arrivals.empty()) grid.arrival_rates = opts->arrivals;
    if (!opts->intervals.empty()) grid.match_run_intervals = opts->intervals;
    spdlog::info("simulating {} cells x {} repetitions", grid.arrival_rates.size() *
                 grid.match_run_intervals.size(), config.repetitions);
    const auto cells = dynsim::compare_models(config, grid, opts->threads);
    dynsim::write_csv(*open_out(opts->out), config, cells);
    for (const auto& c : cells)
      spdlog::info("arrival {} interval {}: {:.2f}%", c.arrival_rate_days,
                   c.match_run_interval_days, 100 * c.mean_ratio());
  });
}

void add_plot(CLI::App& app) {
  struct Opts {
    std::string csv;
    std::string out = "-";
    std::string svg;
  };
  auto opts = std::make_shared<Opts>();
  auto* cmd = app.add_subcommand(
      "plot", "Mean transplant ratio per grid cell from a simulate CSV, as a table and SVG");
  cmd->add_option("csv", opts->csv, "CSV written by 'simulate'")->required();
  cmd->add_option("-o,--out", opts->out, "Output table (CSV of percentages)");
  cmd->add_option("--svg", opts->svg, "Also render a heat map to this SVG file");
  cmd->callback([opts] {
    Grid grid;
    try {
      grid = read_grid(*open_in(opts->csv));
    } catch (const ParseError& e) {
      throw ParseError(0, opts->csv + ": " + e.what());
    }
    std::vector<double> arrivals, intervals;
    for (const auto& [key, cell] : grid) {
      arrivals.push_back(key.first);
      intervals.push_back(key.second);
    }
    for (auto* v : {&arrivals, &intervals}) {
      std::sort(v->begin(), v->end());
      v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    write_table(*open_out(opts->out), grid, arrivals, intervals);
    if (!opts->svg.empty()) write_svg(*open_out(opts->svg), grid, arrivals, intervals);
  });
}

}  // namespace kep::cli
