#include "flowlens/server.hpp"

#include <atomic>
#include <httplib.h>

#include "flowlens/errors.hpp"

namespace flowlens {

namespace {

http_reply json_reply(int status, const json& body) { return {status, "application/json", body.dump() + "\n"}; }

http_reply failure(int status, const json& detail) { return json_reply(status, json{{"error", detail}}); }

http_reply busy() {
    return failure(409, json{{"kind", "Busy"}, {"message", "a pulse is being evaluated"}, {"path", nullptr},
                             {"span", nullptr}, {"line", nullptr}, {"col", nullptr}});
}

http_reply bad_request(const std::string& message) {
    return failure(400, json{{"kind", "BadRequest"}, {"message", message}, {"path", nullptr}, {"span", nullptr},
                             {"line", nullptr}, {"col", nullptr}});
}

std::optional<json> parse_body(std::string_view body) {
    try {
        return json::parse(body);
    } catch (const json::parse_error&) {
        return std::nullopt;
    }
}

} // namespace

service::service(std::string spec_text, std::filesystem::path data_dir)
    : session_(std::make_unique<session>(std::move(spec_text), data_dir)), data_dir_(std::move(data_dir)) {
    publish();
}

void service::publish() {
    auto report = session_->report();
    json pulses = json::array();
    for (const auto& pr : report.pulses) {
        const auto& p = pr.data;
        pulses.push_back({{"id", p.id},
                          {"trigger", p.trigger ? json{{"signal", p.trigger->name}, {"value", to_json(p.trigger->value)}}
                                                : json("init")},
                          {"wall_total_ns", p.wall_total_ns},
                          {"evaluated", p.evaluated.size()}});
    }
    auto snap = std::make_shared<const snapshot>(snapshot{serialize_report(report), pulses.dump() + "\n", report.svg});
    std::atomic_store(&snapshot_, std::move(snap));
}

std::shared_ptr<const service::snapshot> service::current() const { return std::atomic_load(&snapshot_); }

http_reply service::get_report() const { return {200, "application/json", current()->report}; }

http_reply service::get_pulses() const { return {200, "application/json", current()->pulses}; }

http_reply service::get_scene() const { return {200, "image/svg+xml", current()->svg}; }

http_reply service::post_signal(std::string_view body) {
    std::unique_lock lock(eval_, std::try_to_lock);
    if (!lock.owns_lock())
        return busy();
    auto j = parse_body(body);
    if (!j || !j->is_object() || !j->contains("name") || !(*j)["name"].is_string() || !j->contains("value"))
        return bad_request("expected {\"name\": string, \"value\": scalar}");
    signal_update u;
    u.name = (*j)["name"].get<std::string>();
    try {
        u.value = scalar_from_json((*j)["value"]);
    } catch (const std::exception&) {
        return bad_request("signal values must be scalars");
    }
    try {
        auto id = session_->apply(u).id;
        publish();
        return json_reply(200, json{{"pulse", id}});
    } catch (const error& e) {
        return failure(400, describe_failure(e, session_->doc().source_text()));
    }
}

http_reply service::post_spec(std::string_view body) {
    std::unique_lock lock(eval_, std::try_to_lock);
    if (!lock.owns_lock())
        return busy();
    auto j = parse_body(body);
    if (!j || !j->is_object() || !j->contains("text") || !(*j)["text"].is_string())
        return bad_request("expected {\"text\": string}");
    auto text = (*j)["text"].get<std::string>();
    try {
        auto next = std::make_unique<session>(text, data_dir_);
        session_ = std::move(next);
    } catch (const std::exception& e) {
        return failure(400, describe_failure(e, text));
    }
    publish();
    return {200, "application/json", current()->report};
}

struct http_server::impl {
    httplib::Server server;
};

http_server::http_server(service& svc) : impl_(std::make_unique<impl>()) {
    auto send = [](httplib::Response& res, const http_reply& r) {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    auto& s = impl_->server;
    s.Get("/report", [&svc, send](const httplib::Request&, httplib::Response& res) { send(res, svc.get_report()); });
    s.Get("/pulses", [&svc, send](const httplib::Request&, httplib::Response& res) { send(res, svc.get_pulses()); });
    s.Get("/scene", [&svc, send](const httplib::Request&, httplib::Response& res) { send(res, svc.get_scene()); });
    s.Post("/signal",
           [&svc, send](const httplib::Request& req, httplib::Response& res) { send(res, svc.post_signal(req.body)); });
    s.Post("/spec",
           [&svc, send](const httplib::Request& req, httplib::Response& res) { send(res, svc.post_spec(req.body)); });
}

http_server::~http_server() = default;

int http_server::bind(const std::string& host, int port) {
    if (port == 0)
        return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

void http_server::listen() { impl_->server.listen_after_bind(); }

void http_server::stop() { impl_->server.stop(); }

} // namespace flowlens
