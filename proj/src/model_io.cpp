#include "orff/model_io.hpp"

#include <fstream>
#include <json.hpp>

#include "orff/linalg.hpp"

namespace orff::model_io {

namespace {

using nlohmann::json;

json matrix_rows(const Matrix& M) {
  json rows = json::array();
  for (Index i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (Index j = 0; j < M.cols(); ++j) row.push_back(M(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix matrix_from_rows(const json& rows, Index expect_rows, Index expect_cols,
                        const char* what) {
  if (!rows.is_array() || static_cast<Index>(rows.size()) != expect_rows) {
    throw InvalidParameter(std::string("model file: bad shape for ") + what);
  }
  Matrix M(expect_rows, expect_cols);
  for (Index i = 0; i < expect_rows; ++i) {
    const json& row = rows[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Index>(row.size()) != expect_cols) {
      throw InvalidParameter(std::string("model file: bad shape for ") + what);
    }
    for (Index j = 0; j < expect_cols; ++j) {
      M(i, j) = row[static_cast<std::size_t>(j)].get<double>();
    }
  }
  return M;
}

}  // namespace

std::string model_to_json(const learn::RidgeModel& model) {
  const KernelSpec& spec = model.handle.spec();
  json doc;
  doc["format_version"] = 1;
  doc["spec"]["family"] = to_string(spec.family);
  doc["spec"]["d"] = spec.d;
  doc["spec"]["p"] = spec.p;
  doc["spec"]["sigma"] = spec.sigma;
  if (spec.family == Family::Decomposable) {
    doc["spec"]["A"] = matrix_rows(spec.A);
  }
  doc["seed"] = model.handle.seed;
  doc["D"] = model.handle.D;
  doc["lambda"] = model.lambda;
  doc["theta"] = matrix_rows(model.Theta);
  doc["freq_checksum"] = matrix_checksum(model.handle.draw.omegas);
  return doc.dump(2);
}

learn::RidgeModel model_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("model file is not valid JSON: ") +
                           e.what());
  }
  try {
    if (doc.at("format_version").get<int>() != 1) {
      throw InvalidParameter("unsupported model format_version");
    }
    const json& js = doc.at("spec");
    const Family family = family_from_string(js.at("family").get<std::string>());
    const Index d = js.at("d").get<Index>();
    const Index p = js.at("p").get<Index>();
    const double sigma = js.at("sigma").get<double>();
    KernelSpec spec;
    switch (family) {
      case Family::Decomposable:
        spec = KernelSpec::decomposable(
            d, matrix_from_rows(js.at("A"), p, p, "spec.A"), sigma);
        break;
      case Family::CurlFree:
        spec = KernelSpec::curl_free(d, sigma);
        break;
      case Family::DivFree:
        spec = KernelSpec::div_free(d, sigma);
        break;
    }
    const auto seed = doc.at("seed").get<std::uint64_t>();
    const auto D = doc.at("D").get<Index>();

    learn::RidgeModel model;
    model.handle = features::build_feature_map(spec, D, seed);
    const auto checksum = doc.at("freq_checksum").get<std::uint64_t>();
    if (checksum != matrix_checksum(model.handle.draw.omegas)) {
      throw InvalidParameter(
          "model file frequency checksum mismatch: the stored seed no longer "
          "reproduces the frequencies this model was trained with");
    }
    model.lambda = doc.at("lambda").get<double>();
    model.Theta =
        matrix_from_rows(doc.at("theta"), 2 * D, model.handle.pprime, "theta");
    return model;
  } catch (const json::exception& e) {
    throw InvalidParameter(std::string("model file is missing fields: ") +
                           e.what());
  }
}

void save_model(const std::string& path, const learn::RidgeModel& model) {
  std::ofstream out(path);
  if (!out) throw InvalidParameter("cannot open model file for writing: " + path);
  out << model_to_json(model) << "\n";
}

learn::RidgeModel load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidParameter("cannot open model file: " + path);
  std::string text((std::istreambuf_iterator<char>(in)),
                   std::istreambuf_iterator<char>());
  return model_from_json(text);
}

}  // namespace orff::model_io
