#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "hagat/harness/experiment.hpp"

namespace hagat::harness {

/// Shortest decimal form that parses back to exactly `v`.
std::string format_double(double v);

/// `layer,source,target,value` rows: t*t pattern cells, then one
/// `layer,self,self,value` row.
void write_lap_csv(const std::filesystem::path& path, int layer, const Lap& lap);
/// Heatmap of the pattern plus a separate self-loop cell, each annotated
/// with format_double of its value.
void write_lap_svg(const std::filesystem::path& path, int layer, const Lap& lap);

/// Values of the `value` column in a file written by write_lap_csv, in order.
std::vector<double> read_lap_csv(const std::filesystem::path& path);
/// Numbers inside the annotation text elements of an SVG written here, in order.
std::vector<double> read_svg_annotations(const std::filesystem::path& path);

/// `node,s_1,...,s_t` rows.
void write_distribution_csv(const std::filesystem::path& path, const ad::Matrix& s);
/// Plain CSV of a matrix with a header `source,c_1,...`.
void write_matrix_csv(const std::filesystem::path& path, const ad::Matrix& m);
void write_heatmap_svg(const std::filesystem::path& path, const ad::Matrix& m, const std::string& title);

nlohmann::json laps_to_json(const std::vector<Lap>& laps);
nlohmann::json report_to_json(const RunReport& report);
nlohmann::json grid_to_json(const GridResult& grid);
void write_grid_csv(const std::filesystem::path& path, const GridResult& grid);

nlohmann::json train_config_to_json(const TrainConfig& c);
/// Missing keys keep their defaults; "model" holds a model config and
/// "split" a mode name. Throws ParameterError on bad values.
TrainConfig train_config_from_json(const nlohmann::json& j);
/// Reads a grid object {"lr": [...], "weight_decay": [...], "dropout": [...],
/// "lambda": [...]}; missing axes keep the defaults.
Grid grid_from_json(const nlohmann::json& j);

void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace hagat::harness
