#include "blockrelax/container.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace blockrelax {

namespace {

constexpr const char* kMagic = "# blockrelax-instance v1";

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream is(s);
  while (std::getline(is, item, ',')) out.push_back(trim(item));
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[64];
  // Plain shortest form prints large integral values with every exact digit;
  // scientific keeps them within 17 significant digits.
  auto res = std::abs(v) >= 1e17 ? std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::scientific)
                                 : std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& text) {
  const std::string t = trim(text);
  double v = 0.0;
  auto res = std::from_chars(t.data(), t.data() + t.size(), v);
  if (res.ec != std::errc() || res.ptr != t.data() + t.size())
    throw FormatError("cannot parse number '" + text + "'");
  return v;
}

std::string format_index_list(const IndexList& zero_based) {
  std::string out;
  for (std::size_t i = 0; i < zero_based.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(zero_based[i] + 1);
  }
  return out;
}

IndexList parse_index_list(const std::string& one_based_csv) {
  IndexList out;
  if (trim(one_based_csv).empty()) return out;
  for (const auto& item : split_csv(one_based_csv)) {
    int v = 0;
    auto res = std::from_chars(item.data(), item.data() + item.size(), v);
    if (res.ec != std::errc() || res.ptr != item.data() + item.size() || v < 1)
      throw FormatError("bad 1-based index '" + item + "'");
    out.push_back(v - 1);
  }
  return out;
}

std::string format_double_list(const std::vector<double>& values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) out += ',';
    out += format_double(values[i]);
  }
  return out;
}

std::vector<double> parse_double_list(const std::string& csv) {
  std::vector<double> out;
  if (trim(csv).empty()) return out;
  for (const auto& item : split_csv(csv)) out.push_back(parse_double(item));
  return out;
}

void InstanceContainer::set(const std::string& key, std::string value) {
  for (auto& [k, v] : header_) {
    if (k == key) {
      v = std::move(value);
      return;
    }
  }
  header_.emplace_back(key, std::move(value));
}

std::optional<std::string> InstanceContainer::find(const std::string& key) const {
  for (const auto& [k, v] : header_)
    if (k == key) return v;
  return std::nullopt;
}

const std::string& InstanceContainer::get(const std::string& key) const {
  for (const auto& [k, v] : header_)
    if (k == key) return v;
  throw FormatError("container: missing header field '" + key + "'");
}

void InstanceContainer::set_matrix(const std::string& name, Matrix value) {
  for (auto& [k, v] : matrices_) {
    if (k == name) {
      v = std::move(value);
      return;
    }
  }
  matrices_.emplace_back(name, std::move(value));
}

const Matrix& InstanceContainer::matrix(const std::string& name) const {
  for (const auto& [k, v] : matrices_)
    if (k == name) return v;
  throw FormatError("container: missing matrix '" + name + "'");
}

bool InstanceContainer::has_matrix(const std::string& name) const {
  for (const auto& [k, v] : matrices_)
    if (k == name) return true;
  return false;
}

void InstanceContainer::write(std::ostream& os) const {
  os << kMagic << '\n';
  for (const auto& [k, v] : header_) os << k << ": " << v << '\n';
  for (const auto& [name, mat] : matrices_) {
    os << "[matrix " << name << ' ' << mat.rows() << ' ' << mat.cols() << "]\n";
    for (Eigen::Index i = 0; i < mat.rows(); ++i) {
      for (Eigen::Index j = 0; j < mat.cols(); ++j) {
        if (j) os << ',';
        os << format_double(mat(i, j));
      }
      os << '\n';
    }
  }
}

InstanceContainer InstanceContainer::read(std::istream& is) {
  InstanceContainer c;
  std::string line;
  if (!std::getline(is, line) || trim(line) != kMagic) throw FormatError("container: missing magic line");
  while (std::getline(is, line)) {
    const std::string t = trim(line);
    if (t.empty()) continue;
    if (t.rfind("[matrix ", 0) == 0) {
      std::istringstream hs(t.substr(8));
      std::string name;
      Eigen::Index rows = 0, cols = 0;
      hs >> name >> rows >> cols;
      if (!hs || rows < 0 || cols < 0 || name.empty()) throw FormatError("container: bad matrix header '" + t + "'");
      Matrix mat(rows, cols);
      for (Eigen::Index i = 0; i < rows; ++i) {
        if (!std::getline(is, line)) throw FormatError("container: truncated matrix " + name);
        const auto items = split_csv(trim(line));
        if (static_cast<Eigen::Index>(items.size()) != cols && !(cols == 0 && items.empty()))
          throw FormatError("container: wrong column count in matrix " + name);
        for (Eigen::Index j = 0; j < cols; ++j) mat(i, j) = parse_double(items[static_cast<std::size_t>(j)]);
      }
      c.set_matrix(name, std::move(mat));
      continue;
    }
    if (t[0] == '#') continue;
    const auto colon = t.find(':');
    if (colon == std::string::npos) throw FormatError("container: expected 'key: value', got '" + t + "'");
    c.set(trim(t.substr(0, colon)), trim(t.substr(colon + 1)));
  }
  return c;
}

void InstanceContainer::save(const std::filesystem::path& path) const {
  std::ofstream os(path);
  if (!os) throw FormatError("cannot open '" + path.string() + "' for writing");
  write(os);
}

InstanceContainer InstanceContainer::load(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open '" + path.string() + "'");
  return read(is);
}

InstanceContainer to_container(const RelaxedInstance& inst, const GenConfig& cfg) {
  InstanceContainer c;
  c.set("kind", "relaxed-instance");
  c.set("m", std::to_string(inst.A.m()));
  c.set("n", std::to_string(inst.A.n()));
  c.set("theta", std::to_string(inst.A.theta()));
  c.set("r", std::to_string(inst.X.r()));
  c.set("s", std::to_string(cfg.s));
  c.set("sensing_kind", std::string(to_string(cfg.sensing_kind)));
  c.set("planted_alphabet", format_double_list(cfg.planted_alphabet));
  c.set("guess_density", format_double(cfg.guess_density));
  c.set("support_mode", std::string(to_string(cfg.support_mode)));
  c.set("continuous_planted", cfg.continuous_planted ? "1" : "0");
  c.set("reject_zero_guess_columns", cfg.reject_zero_guess_columns ? "1" : "0");
  c.set("master_seed", std::to_string(inst.master_seed));
  c.set("p_x", format_double(inst.dist.p_x));
  c.set("p_X", format_double(inst.dist.p_X));
  c.set("nu", format_double(inst.dist.nu));
  c.set("T", format_index_list(inst.X.planted_global()));
  c.set("S", format_index_list(inst.support.global()));
  for (int l = 0; l < inst.A.theta(); ++l) c.set_matrix("A" + std::to_string(l + 1), inst.A.block(l));
  for (int l = 0; l < inst.X.theta(); ++l) c.set_matrix("X" + std::to_string(l + 1), inst.X.block(l));
  c.set_matrix("x", inst.x);
  c.set_matrix("y", inst.y);
  return c;
}

namespace {

int to_int(const std::string& s) {
  int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw FormatError("bad integer '" + s + "'");
  return v;
}

}  // namespace

std::pair<RelaxedInstance, GenConfig> instance_from_container(const InstanceContainer& c) {
  GenConfig cfg;
  cfg.m = to_int(c.get("m"));
  cfg.n = to_int(c.get("n"));
  cfg.theta = to_int(c.get("theta"));
  cfg.r = to_int(c.get("r"));
  cfg.s = to_int(c.get("s"));
  cfg.sensing_kind = parse_sensing_kind(c.get("sensing_kind"));
  cfg.planted_alphabet = parse_double_list(c.get("planted_alphabet"));
  cfg.guess_density = parse_double(c.get("guess_density"));
  cfg.support_mode = parse_support_mode(c.get("support_mode"));
  cfg.continuous_planted = c.find("continuous_planted").value_or("0") == "1";
  cfg.reject_zero_guess_columns = c.find("reject_zero_guess_columns").value_or("1") == "1";
  cfg.master_seed = std::stoull(c.get("master_seed"));

  RelaxedInstance inst;
  std::vector<Matrix> a_blocks, x_blocks;
  for (int l = 0; l < cfg.theta; ++l) {
    a_blocks.push_back(c.matrix("A" + std::to_string(l + 1)));
    x_blocks.push_back(c.matrix("X" + std::to_string(l + 1)));
  }
  const IndexList t = parse_index_list(c.get("T"));
  if (static_cast<int>(t.size()) != cfg.theta) throw FormatError("container: T must list one column per block");
  IndexList local(t.size());
  for (std::size_t l = 0; l < t.size(); ++l) {
    if (t[l] / cfg.r != static_cast<int>(l)) throw FormatError("container: T entry outside its block");
    local[l] = t[l] % cfg.r;
  }
  inst.A = BlockSensingMatrix(std::move(a_blocks));
  inst.X = GuessEnsemble(std::move(x_blocks), std::move(local));
  inst.x = c.matrix("x").col(0);
  inst.y = c.matrix("y").col(0);
  inst.support = SupportPattern(parse_index_list(c.get("S")), cfg.n, cfg.theta);
  inst.dist = DistParams{parse_double(c.get("p_x")), parse_double(c.get("p_X")), parse_double(c.get("nu"))};
  inst.master_seed = cfg.master_seed;
  inst.validate();
  return {std::move(inst), std::move(cfg)};
}

}  // namespace blockrelax
