#include "stealix/world.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace stealix {

void WorldConfig::validate() const {
  if (dim < 1) throw std::invalid_argument("WorldConfig: dim must be positive");
  if (classes < 2) throw std::invalid_argument("WorldConfig: need at least 2 classes");
  if (dim < classes) throw std::invalid_argument("WorldConfig: dim must be >= classes");
  if (vocab_size < 2) throw std::invalid_argument("WorldConfig: vocab_size must be >= 2");
  if (prompt_length < 1) throw std::invalid_argument("WorldConfig: prompt_length must be >= 1");
  if (generator_noise < 0) throw std::invalid_argument("WorldConfig: generator_noise < 0");
  if (victim_noise < 0) throw std::invalid_argument("WorldConfig: victim_noise < 0");
  if (distractor_strength < 0) throw std::invalid_argument("WorldConfig: distractor_strength < 0");
  if (softmax_temperature <= 0) throw std::invalid_argument("WorldConfig: temperature <= 0");
  if (train_per_class < 1 || test_per_class < 1)
    throw std::invalid_argument("WorldConfig: per-class sample counts must be >= 1");
}

VictimResponse victim_predict(const World& world, const FeatureVec& x) {
  if (x.size() != world.cfg.dim)
    throw std::invalid_argument("victim_predict: input dimension mismatch");
  if (!x.allFinite()) throw std::invalid_argument("victim_predict: non-finite input");

  const int K = world.cfg.classes;
  VictimResponse out;
  Eigen::VectorXd scores = Eigen::VectorXd::Zero(K);
  const double nx = x.norm();
  out.degenerate = nx == 0.0;
  if (!out.degenerate) scores = world.prototypes * (x / nx);

  out.hard = 0;
  for (int c = 1; c < K; ++c)
    if (scores(c) > scores(out.hard)) out.hard = c;

  const Eigen::ArrayXd logits = scores.array() / world.cfg.softmax_temperature;
  const Eigen::ArrayXd shifted = (logits - logits.maxCoeff()).exp();
  out.soft = (shifted / shifted.sum()).matrix();
  return out;
}

FeatureVec generate(const World& world, const HardPrompt& prompt, Rng& rng) {
  const FeatureVec t_raw = text_encoding_raw(world.text_map, prompt_rows(world.vocab, prompt));
  FeatureVec x = world.gen_map * t_raw + world.gen_offset;
  if (world.cfg.generator_noise > 0.0)
    x += world.cfg.generator_noise * rng.normal_vector(world.cfg.dim);
  return x;
}

std::vector<LabeledSample> sample_victim_data(const World& world, int per_class, Split split,
                                              std::uint64_t base_seed) {
  if (per_class < 1) throw std::invalid_argument("sample_victim_data: per_class must be >= 1");
  Rng rng = substream(base_seed, split == Split::train ? "world.victim-train" : "world.victim-test");
  std::vector<LabeledSample> data;
  data.reserve(static_cast<std::size_t>(per_class) * static_cast<std::size_t>(world.cfg.classes));
  for (ClassId c = 0; c < world.cfg.classes; ++c)
    for (int i = 0; i < per_class; ++i) {
      LabeledSample s;
      s.feature = world.prototypes.row(c).transpose() +
                  world.cfg.victim_noise * rng.normal_vector(world.cfg.dim);
      s.predicted = c;  // ground-truth label of the generating class
      data.push_back(std::move(s));
    }
  return data;
}

namespace {

// Gram-Schmidt rows of standard-normal draws; redraws on near-degenerate
// residuals (probability zero in exact arithmetic).
Eigen::MatrixXd orthonormal_rows(int count, int dim, Rng& rng) {
  Eigen::MatrixXd rows(count, dim);
  for (int i = 0; i < count; ++i) {
    for (int attempt = 0;; ++attempt) {
      if (attempt >= 1000)
        throw std::runtime_error("build_world: failed to draw independent prototype directions");
      Eigen::VectorXd v = rng.normal_vector(dim);
      for (int j = 0; j < i; ++j) v -= rows.row(j).dot(v) * rows.row(j).transpose();
      const double n = v.norm();
      if (n > 1e-8) {
        rows.row(i) = v.transpose() / n;
        break;
      }
    }
  }
  return rows;
}

}  // namespace

World build_world(const WorldConfig& cfg) {
  cfg.validate();
  World world;
  world.cfg = cfg;

  {
    Rng rng = substream(cfg.rng_seed, "world.vocab");
    world.vocab.embeddings = rng.normal_matrix(cfg.vocab_size, cfg.dim);
    world.vocab.validate();
  }

  world.text_map = Eigen::MatrixXd::Identity(cfg.dim, cfg.dim);
  world.image_map = Eigen::MatrixXd::Identity(cfg.dim, cfg.dim);
  world.gen_map = Eigen::MatrixXd::Identity(cfg.dim, cfg.dim);
  world.gen_offset = Eigen::VectorXd::Zero(cfg.dim);

  {
    Rng rng = substream(cfg.rng_seed, "world.prototypes");
    world.prototypes = orthonormal_rows(cfg.classes, cfg.dim, rng);
  }

  {
    Rng rng = substream(cfg.rng_seed, "world.distractor");
    if (cfg.dim > cfg.classes) {
      for (int attempt = 0;; ++attempt) {
        if (attempt >= 1000)
          throw std::runtime_error("build_world: failed to draw a distractor direction");
        Eigen::VectorXd v = rng.normal_vector(cfg.dim);
        v -= world.prototypes.transpose() * (world.prototypes * v);
        const double n = v.norm();
        if (n > 1e-8) {
          world.distractor = v / n;
          break;
        }
      }
    } else {
      world.distractor = rng.normal_vector(cfg.dim).normalized();
    }
  }

  world.victim_train = sample_victim_data(world, cfg.train_per_class, Split::train, cfg.rng_seed);
  world.victim_test = sample_victim_data(world, cfg.test_per_class, Split::test, cfg.rng_seed);

  for (ClassId c = 0; c < cfg.classes; ++c) {
    Rng rng = substream(cfg.rng_seed, "world.seed-image", static_cast<std::uint64_t>(c));
    bool accepted = false;
    for (int attempt = 0; attempt < 1000 && !accepted; ++attempt) {
      FeatureVec x = world.prototypes.row(c).transpose() +
                     cfg.distractor_strength * world.distractor +
                     cfg.victim_noise * rng.normal_vector(cfg.dim);
      if (victim_predict(world, x).hard == c) {
        world.seeds.push_back({std::move(x), c});
        accepted = true;
      }
    }
    if (!accepted)
      throw std::runtime_error(
          "build_world: no victim-correct seed found in 1000 attempts; "
          "distractor_strength or victim_noise is too large");
  }
  return world;
}

namespace {

constexpr char kMagic[8] = {'S', 'T', 'X', 'W', 'R', 'L', 'D', '1'};

void write_i64(std::ofstream& f, std::int64_t v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_u64(std::ofstream& f, std::uint64_t v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_f64(std::ofstream& f, double v) {
  f.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void write_matrix(std::ofstream& f, const Eigen::MatrixXd& m) {
  write_i64(f, m.rows());
  write_i64(f, m.cols());
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) write_f64(f, m(r, c));
}

void write_samples(std::ofstream& f, const std::vector<LabeledSample>& v) {
  write_i64(f, static_cast<std::int64_t>(v.size()));
  for (const LabeledSample& s : v) {
    write_i64(f, s.predicted);
    write_i64(f, s.feature.size());
    for (Eigen::Index i = 0; i < s.feature.size(); ++i) write_f64(f, s.feature(i));
  }
}

std::int64_t read_i64(std::ifstream& f) {
  std::int64_t v = 0;
  f.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

std::uint64_t read_u64(std::ifstream& f) {
  std::uint64_t v = 0;
  f.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

double read_f64(std::ifstream& f) {
  double v = 0;
  f.read(reinterpret_cast<char*>(&v), sizeof v);
  return v;
}

Eigen::MatrixXd read_matrix(std::ifstream& f) {
  const std::int64_t rows = read_i64(f);
  const std::int64_t cols = read_i64(f);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index r = 0; r < rows; ++r)
    for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = read_f64(f);
  return m;
}

std::vector<LabeledSample> read_samples(std::ifstream& f) {
  const std::int64_t n = read_i64(f);
  std::vector<LabeledSample> v;
  v.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) {
    LabeledSample s;
    s.predicted = static_cast<ClassId>(read_i64(f));
    const std::int64_t d = read_i64(f);
    s.feature.resize(d);
    for (Eigen::Index k = 0; k < d; ++k) s.feature(k) = read_f64(f);
    v.push_back(std::move(s));
  }
  return v;
}

}  // namespace

void save_world(const World& world, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("save_world: cannot open " + path);
  f.write(kMagic, sizeof kMagic);
  const WorldConfig& c = world.cfg;
  write_i64(f, c.dim);
  write_i64(f, c.classes);
  write_i64(f, c.vocab_size);
  write_i64(f, c.prompt_length);
  write_f64(f, c.generator_noise);
  write_f64(f, c.victim_noise);
  write_f64(f, c.distractor_strength);
  write_f64(f, c.softmax_temperature);
  write_i64(f, c.train_per_class);
  write_i64(f, c.test_per_class);
  write_u64(f, c.rng_seed);
  write_matrix(f, world.vocab.embeddings);
  write_matrix(f, world.text_map);
  write_matrix(f, world.image_map);
  write_matrix(f, world.gen_map);
  write_matrix(f, world.gen_offset);
  write_matrix(f, world.prototypes);
  write_matrix(f, world.distractor);
  write_samples(f, world.victim_train);
  write_samples(f, world.victim_test);
  write_samples(f, world.seeds);
  if (!f) throw std::runtime_error("save_world: write failed for " + path);
}

World load_world(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("load_world: cannot open " + path);
  char magic[8];
  f.read(magic, sizeof magic);
  if (!f || !std::equal(magic, magic + 8, kMagic))
    throw std::runtime_error("load_world: bad snapshot header in " + path);
  World world;
  WorldConfig& c = world.cfg;
  c.dim = static_cast<int>(read_i64(f));
  c.classes = static_cast<int>(read_i64(f));
  c.vocab_size = static_cast<int>(read_i64(f));
  c.prompt_length = static_cast<int>(read_i64(f));
  c.generator_noise = read_f64(f);
  c.victim_noise = read_f64(f);
  c.distractor_strength = read_f64(f);
  c.softmax_temperature = read_f64(f);
  c.train_per_class = static_cast<int>(read_i64(f));
  c.test_per_class = static_cast<int>(read_i64(f));
  c.rng_seed = read_u64(f);
  world.vocab.embeddings = read_matrix(f);
  world.text_map = read_matrix(f);
  world.image_map = read_matrix(f);
  world.gen_map = read_matrix(f);
  world.gen_offset = read_matrix(f);
  world.prototypes = read_matrix(f);
  world.distractor = read_matrix(f);
  world.victim_train = read_samples(f);
  world.victim_test = read_samples(f);
  world.seeds = read_samples(f);
  if (!f) throw std::runtime_error("load_world: truncated snapshot " + path);
  return world;
}

}  // namespace stealix
