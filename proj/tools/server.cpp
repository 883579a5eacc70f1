#include "server.hpp"

#include <json.hpp>
#include <regex>
#include <string>
#include <vector>

#include "relief/errors.hpp"
#include "relief/image.hpp"
#include "relief/pipeline.hpp"
#include "relief/project.hpp"
#include "relief/stl.hpp"

// After Eigen: httplib pulls in system headers that break its templates.
#include <httplib.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace relief::server {

namespace {

constexpr const char* kIdPattern = "([A-Za-z0-9_-]+)";

std::string base64(const std::vector<std::uint8_t>& bytes) {
  static const char* table = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";
  std::string out;
  out.reserve((bytes.size() + 2) / 3 * 4);
  std::size_t i = 0;
  for (; i + 2 < bytes.size(); i += 3) {
    const std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8) | bytes[i + 2];
    out += table[(n >> 18) & 63];
    out += table[(n >> 12) & 63];
    out += table[(n >> 6) & 63];
    out += table[n & 63];
  }
  if (i + 1 == bytes.size()) {
    const std::uint32_t n = bytes[i] << 16;
    out += table[(n >> 18) & 63];
    out += table[(n >> 12) & 63];
    out += "==";
  } else if (i + 2 == bytes.size()) {
    const std::uint32_t n = (bytes[i] << 16) | (bytes[i + 1] << 8);
    out += table[(n >> 18) & 63];
    out += table[(n >> 12) & 63];
    out += table[(n >> 6) & 63];
    out += '=';
  }
  return out;
}

json diagnostics_json(const std::vector<Diagnostic>& diags) {
  json arr = json::array();
  for (const auto& d : diags) arr.push_back({{"code", d.code}, {"path", d.path}, {"message", d.message}});
  return arr;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view kind, const std::string& message,
                const std::vector<Diagnostic>& diags = {}) {
  send_json(res, status,
            {{"error", kind}, {"message", message}, {"diagnostics", diagnostics_json(diags)}});
}

int status_for(ErrorKind kind) {
  switch (classify(kind)) {
    case ErrorClass::Validation:
    case ErrorClass::Geometry:
      return 422;
    case ErrorClass::Io:
      return kind == ErrorKind::MissingImage ? 409 : 500;
    case ErrorClass::Internal:
      break;
  }
  return 500;
}

json map_cell(const ReliefMap& map, const CellIndex& c) {
  return json::array({map.origin.col + c.col, map.origin.row + c.row});
}

bool blocking(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags) {
    if (d.code != "EmptyProject") return true;
  }
  return false;
}

}  // namespace

ReliefServer::ReliefServer(ServerConfig config)
    : config_(std::move(config)), http_(std::make_unique<httplib::Server>()) {
  fs::create_directories(config_.project_dir);
  install_routes();
}

ReliefServer::~ReliefServer() { stop(); }

bool ReliefServer::bind(const std::string& host, int port) {
  if (port == 0) {
    port_ = http_->bind_to_any_port(host);
    return port_ > 0;
  }
  if (!http_->bind_to_port(host, port)) return false;
  port_ = port;
  return true;
}

bool ReliefServer::listen() { return http_->listen_after_bind(); }

void ReliefServer::stop() {
  if (http_) http_->stop();
}

std::shared_ptr<std::shared_mutex> ReliefServer::lock_for(const std::string& id) {
  std::lock_guard guard(locks_mutex_);
  auto& slot = locks_[id];
  if (!slot) slot = std::make_shared<std::shared_mutex>();
  return slot;
}

void ReliefServer::install_routes() {
  auto& svr = *http_;
  const fs::path root = config_.project_dir;

  if (config_.static_dir) svr.set_mount_point("/", config_.static_dir->string());

  svr.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    try {
      std::rethrow_exception(ep);
    } catch (const SchemaError& e) {
      send_error(res, 422, "SchemaError", e.what(), {{"SchemaError", e.path(), e.what()}});
    } catch (const Error& e) {
      send_error(res, status_for(e.kind()), to_string(e.kind()), e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, "Internal", e.what());
    }
  });

  svr.Get("/api/health", [](const httplib::Request&, httplib::Response& res) {
    send_json(res, 200, {{"status", "ok"}});
  });

  auto project_path = [root](const std::string& id) { return root / id / "project.json"; };

  svr.Post("/api/projects", [this, root, project_path](const httplib::Request& req, httplib::Response& res) {
    ReliefProject project;
    if (!req.body.empty()) project = parse_project(req.body);
    if (project.image1_path.empty()) project.image1_path = "image1.png";
    if (project.image2_path.empty()) project.image2_path = "image2.png";

    std::string id;
    {
      std::lock_guard guard(locks_mutex_);
      for (int n = 1;; ++n) {
        id = "p" + std::to_string(n);
        if (fs::create_directory(root / id)) break;
      }
    }
    std::unique_lock lock(*lock_for(id));
    save_project(project, project_path(id));
    json body = json::parse(to_json(project));
    send_json(res, 201, {{"id", id}, {"project", body}});
  });

  const std::string project_route = std::string("/api/projects/") + kIdPattern;

  svr.Get(project_route, [this, project_path](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    std::shared_lock lock(*lock_for(id));
    if (!fs::exists(project_path(id))) return send_error(res, 404, "NotFound", "no project " + id);
    res.set_content(to_json(load_project(project_path(id), false)), "application/json");
  });

  svr.Put(project_route, [this, root, project_path](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    std::unique_lock lock(*lock_for(id));
    if (!fs::exists(project_path(id))) return send_error(res, 404, "NotFound", "no project " + id);
    const ReliefProject project = parse_project(req.body);
    const auto diags = validate(project, root / id);
    if (blocking(diags)) {
      return send_error(res, 422, diags.front().code, "project has annotation errors", diags);
    }
    save_project(project, project_path(id));
    send_json(res, 200, {{"project", json::parse(to_json(project))}, {"diagnostics", diagnostics_json(diags)}});
  });

  const std::string image_route = project_route + "/images/([12])";

  svr.Get(image_route, [this, root, project_path](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    std::shared_lock lock(*lock_for(id));
    if (!fs::exists(project_path(id))) return send_error(res, 404, "NotFound", "no project " + id);
    const ReliefProject project = load_project(project_path(id), false);
    const fs::path file = root / id / (req.matches[2] == "1" ? project.image1_path : project.image2_path);
    if (!fs::exists(file)) return send_error(res, 404, "MissingImage", "image not uploaded");
    const auto bytes = read_file(file);
    res.set_content(reinterpret_cast<const char*>(bytes.data()), bytes.size(), "image/png");
  });

  svr.Put(image_route, [this, root, project_path](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    std::unique_lock lock(*lock_for(id));
    if (!fs::exists(project_path(id))) return send_error(res, 404, "NotFound", "no project " + id);
    const std::span<const std::uint8_t> bytes(reinterpret_cast<const std::uint8_t*>(req.body.data()),
                                              req.body.size());
    Image image;
    try {
      image = decode_png(bytes);
    } catch (const Error& e) {
      return send_error(res, 422, to_string(e.kind()), e.what());
    }
    ReliefProject project = load_project(project_path(id), false);
    const std::string name = "image" + std::string(req.matches[2]) + ".png";
    (req.matches[2] == "1" ? project.image1_path : project.image2_path) = name;
    write_file(root / id / name, bytes);
    save_project(project, project_path(id));
    send_json(res, 200, {{"width", image.width}, {"height", image.height}});
  });

  svr.Post(project_route + "/preview", [this, root, project_path](const httplib::Request& req,
                                                                  httplib::Response& res) {
    const std::string id = req.matches[1];
    std::shared_lock lock(*lock_for(id));
    if (!fs::exists(project_path(id))) return send_error(res, 404, "NotFound", "no project " + id);
    const ReliefProject project = load_project(project_path(id), false);
    const auto diags = validate(project, root / id);
    if (!diags.empty()) return send_error(res, 422, diags.front().code, "project has annotation errors", diags);

    const DepthStage depth = compute_depth(project);
    const ReliefStage relief = assemble(depth, project);
    const ReliefMap& map = relief.final_map;
    json spikes = json::array(), isolated = json::array();
    for (const auto& c : relief.corrected.spikes) spikes.push_back(map_cell(map, c));
    for (const auto& c : relief.corrected.isolated) isolated.push_back(map_cell(map, c));
    send_json(res, 200,
              {{"diagnostics", json::array()},
               {"origin", {map.origin.col, map.origin.row}},
               {"width", map.width()},
               {"height", map.height()},
               {"k", depth.k},
               {"d_min", depth.d_min},
               {"d_max", depth.d_max},
               {"spikes", spikes},
               {"isolated", isolated},
               {"png", base64(encode_png(render_grayscale(map)))}});
  });

  svr.Post(project_route + "/cells", [this, root, project_path](const httplib::Request& req,
                                                                httplib::Response& res) {
    const std::string id = req.matches[1];
    std::unique_lock lock(*lock_for(id));
    if (!fs::exists(project_path(id))) return send_error(res, 404, "NotFound", "no project " + id);

    json body;
    try {
      body = json::parse(req.body);
    } catch (const json::exception& e) {
      return send_error(res, 400, "SchemaError", e.what());
    }
    if (!body.is_object() || !body.contains("edits") || !body["edits"].is_array()) {
      return send_error(res, 422, "SchemaError", "expected {\"edits\": [...]}",
                        {{"SchemaError", "/edits", "missing or not an array"}});
    }

    ReliefProject project = load_project(project_path(id), false);
    const auto diags = validate(project, root / id);
    if (!diags.empty()) return send_error(res, 422, diags.front().code, "project has annotation errors", diags);

    const DepthStage depth = compute_depth(project);
    ReliefMap map = assemble(depth, project).final_map;

    std::vector<CellEdit> applied;
    for (std::size_t i = 0; i < body["edits"].size(); ++i) {
      const json& e = body["edits"][i];
      const std::string path = "/edits/" + std::to_string(i);
      if (!e.is_object() || !e.contains("cell") || !e["cell"].is_array() || e["cell"].size() != 2 ||
          !e["cell"][0].is_number_integer() || !e["cell"][1].is_number_integer()) {
        return send_error(res, 422, "SchemaError", "cell must be [col, row]",
                          {{"SchemaError", path + "/cell", "expected two integers"}});
      }
      CellEdit edit{{e["cell"][0].get<int>(), e["cell"][1].get<int>()}, 0.0};
      const int c = edit.cell.col - map.origin.col, r = edit.cell.row - map.origin.row;
      if (!map.provenance.contains(c, r) || map.provenance(c, r) == 0) {
        return send_error(res, 422, "InvalidArgument", "cell is not covered by any face",
                          {{"InvalidArgument", path + "/cell", "cell is not covered by any face"}});
      }
      if (e.contains("height")) {
        if (!e["height"].is_number()) {
          return send_error(res, 422, "SchemaError", "height must be a number",
                            {{"SchemaError", path + "/height", "expected a number"}});
        }
        edit.height = e["height"].get<double>();
      } else {
        edit.height = neighbor_mean(map, edit.cell);
      }
      const CellEdit one[] = {edit};
      map = apply_cell_edits(std::move(map), one);
      applied.push_back(edit);
    }

    for (const auto& edit : applied) {
      auto it = std::find_if(project.cell_edits.begin(), project.cell_edits.end(),
                             [&](const CellEdit& x) { return x.cell == edit.cell; });
      if (it != project.cell_edits.end()) {
        it->height = edit.height;
      } else {
        project.cell_edits.push_back(edit);
      }
    }
    save_project(project, project_path(id));

    json out = json::array();
    for (const auto& e : applied) out.push_back({{"cell", {e.cell.col, e.cell.row}}, {"height", e.height}});
    send_json(res, 200, {{"applied", out}, {"cell_edit_count", project.cell_edits.size()}});
  });

  svr.Post(project_route + "/stl", [this, root, project_path](const httplib::Request& req,
                                                              httplib::Response& res) {
    const std::string id = req.matches[1];
    std::shared_lock lock(*lock_for(id));
    if (!fs::exists(project_path(id))) return send_error(res, 404, "NotFound", "no project " + id);
    const ReliefProject project = load_project(project_path(id), false);
    const auto diags = validate(project, root / id);
    if (!diags.empty()) return send_error(res, 422, diags.front().code, "project has annotation errors", diags);

    const PipelineResult result = run_pipeline(project);
    const bool ascii = req.has_param("format") && req.get_param_value("format") == "ascii";
    const auto bytes = write_stl(result.mesh, ascii ? StlFormat::Ascii : StlFormat::Binary);
    const std::string name = project.name.empty() ? id : project.name;
    res.set_header("Content-Disposition", "attachment; filename=\"" + name + ".stl\"");
    res.set_content(reinterpret_cast<const char*>(bytes.data()), bytes.size(),
                    ascii ? "model/stl; charset=us-ascii" : "model/stl");
  });
}

}  // namespace relief::server
