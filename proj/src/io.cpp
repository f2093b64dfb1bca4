#include "cavbell/io.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <system_error>

#include "cavbell/error.hpp"

namespace cavbell::io {

namespace fs = std::filesystem;

std::string format_double(double v) {
  char buf[40];
  const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

nlohmann::ordered_json state_to_json(const fock::ModeState2D& state) {
  nlohmann::ordered_json doc;
  doc["nmax"] = state.nmax();
  nlohmann::ordered_json coeffs = nlohmann::ordered_json::array();
  for (int nx = 0; nx <= state.nmax(); ++nx) {
    for (int ny = 0; ny <= state.nmax(); ++ny) {
      coeffs.push_back({state(nx, ny).real(), state(nx, ny).imag()});
    }
  }
  doc["coeffs"] = std::move(coeffs);
  return doc;
}

fock::ModeState2D state_from_json(const nlohmann::json& doc) {
  try {
    const int nmax = doc.at("nmax").get<int>();
    if (nmax < 0) throw ConfigError("state nmax must be nonnegative");
    const auto& coeffs = doc.at("coeffs");
    const std::size_t dim = static_cast<std::size_t>(nmax) + 1;
    if (!coeffs.is_array() || coeffs.size() != dim * dim) {
      throw ConfigError("state coeffs must hold (nmax+1)^2 = " + std::to_string(dim * dim) +
                        " complex pairs");
    }
    Eigen::MatrixXcd c(dim, dim);
    for (std::size_t k = 0; k < coeffs.size(); ++k) {
      const auto& pair = coeffs[k];
      if (!pair.is_array() || pair.size() != 2) {
        throw ConfigError("state coefficient " + std::to_string(k) + " is not a [re, im] pair");
      }
      c(k / dim, k % dim) = {pair[0].get<double>(), pair[1].get<double>()};
    }
    return fock::ModeState2D(std::move(c));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed state JSON: ") + e.what());
  }
}

void write_frame_csv(std::ostream& out, const field::FieldGrid& frame) {
  const modes::Grid1D& g = frame.grid();
  out << "x,y,re,im\n";
  std::string line;
  for (int i = 0; i < g.count(); ++i) {
    const std::string x = format_double(g.point(i));
    for (int j = 0; j < g.count(); ++j) {
      line.clear();
      line += x;
      line += ',';
      line += format_double(g.point(j));
      line += ',';
      line += format_double(frame(i, j).real());
      line += ',';
      line += format_double(frame(i, j).imag());
      line += '\n';
      out << line;
    }
  }
}

std::string frame_csv(const field::FieldGrid& frame) {
  std::ostringstream s;
  write_frame_csv(s, frame);
  return s.str();
}

namespace {

double parse_number(const std::string& text, int row) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size()) {
    throw ConfigError("frame CSV row " + std::to_string(row) + ": bad number '" + text + "'");
  }
  return v;
}

}  // namespace

field::FieldGrid read_frame_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "x,y,re,im") {
    throw ConfigError("frame CSV row 1: expected header x,y,re,im");
  }
  struct Row {
    double x, y, re, im;
  };
  std::vector<Row> rows;
  int row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (line.empty()) continue;
    std::array<std::string, 4> cells;
    std::istringstream ls(line);
    std::size_t k = 0;
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      if (k >= cells.size()) break;
      cells[k++] = cell;
    }
    if (k != 4 || ls.rdbuf()->in_avail() > 0) {
      throw ConfigError("frame CSV row " + std::to_string(row_number) + ": expected 4 columns");
    }
    rows.push_back({parse_number(cells[0], row_number), parse_number(cells[1], row_number),
                    parse_number(cells[2], row_number), parse_number(cells[3], row_number)});
  }
  std::map<double, int> xs;
  for (const Row& r : rows) xs.emplace(r.x, 0);
  const int n = static_cast<int>(xs.size());
  if (n < 2 || static_cast<std::size_t>(n) * n != rows.size()) {
    throw ConfigError("frame CSV does not describe a square grid");
  }
  int idx = 0;
  for (auto& [x, i] : xs) i = idx++;
  const double h = (xs.rbegin()->first - xs.begin()->first) / (n - 1);
  const modes::Grid1D grid(0.5 * n * h, n);
  Eigen::MatrixXcd values = Eigen::MatrixXcd::Zero(n, n);
  for (const Row& r : rows) {
    const auto ix = xs.find(r.x);
    const auto iy = xs.find(r.y);
    if (ix == xs.end() || iy == xs.end()) throw ConfigError("frame CSV has mismatched x/y axes");
    values(ix->second, iy->second) = {r.re, r.im};
  }
  return field::FieldGrid(grid, std::move(values));
}

std::string trajectory_csv(const std::vector<antenna::TrajectoryPoint>& trajectory) {
  std::string out = "step,parity_x,parity_y,fidelity_01,fidelity_10\n";
  for (const auto& p : trajectory) {
    out += std::to_string(p.step);
    for (double v : {p.parity_x, p.parity_y, p.fidelity_01, p.fidelity_10}) {
      out += ',';
      out += format_double(v);
    }
    out += '\n';
  }
  return out;
}

StagedOutput::StagedOutput(fs::path out_dir) : out_dir_(std::move(out_dir)) {
  std::error_code ec;
  fs::create_directories(out_dir_, ec);
  if (ec) throw IoError("cannot create output directory " + out_dir_.string() + ": " + ec.message());
  for (int attempt = 0;; ++attempt) {
    stage_dir_ = out_dir_ / (".staging-" + std::to_string(attempt));
    if (fs::create_directory(stage_dir_, ec)) break;
    if (ec || attempt > 1000) {
      throw IoError("cannot create staging directory in " + out_dir_.string());
    }
  }
}

StagedOutput::~StagedOutput() {
  std::error_code ec;
  fs::remove_all(stage_dir_, ec);
}

void StagedOutput::write(const std::string& relative_path, const std::string& content) {
  if (committed_) throw IoError("output already committed");
  const fs::path target = stage_dir_ / relative_path;
  fs::create_directories(target.parent_path());
  std::ofstream out(target, std::ios::binary);
  out << content;
  out.close();
  if (!out) throw IoError("failed writing " + target.string());
  files_.push_back(relative_path);
}

std::vector<fs::path> StagedOutput::commit() {
  std::vector<fs::path> done;
  for (const std::string& rel : files_) {
    const fs::path final_path = out_dir_ / rel;
    fs::create_directories(final_path.parent_path());
    std::error_code ec;
    fs::rename(stage_dir_ / rel, final_path, ec);
    if (ec) throw IoError("cannot move " + rel + " into " + out_dir_.string() + ": " + ec.message());
    done.push_back(final_path);
  }
  committed_ = true;
  return done;
}

}  // namespace cavbell::io
