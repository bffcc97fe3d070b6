#pragma once

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>

#include "flowlens/session.hpp"

namespace flowlens {

struct http_reply {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

// Endpoint logic, independent of the HTTP library. Mutations are serialized behind one
// guard and answer 409 while another evaluation holds it; reads serve the last published
// snapshot without taking the guard.
class service {
public:
    service(std::string spec_text, std::filesystem::path data_dir); // throws like session

    http_reply get_report() const;
    http_reply get_pulses() const;
    http_reply get_scene() const;
    http_reply post_signal(std::string_view body); // {"name": ..., "value": ...} -> {"pulse": id}
    http_reply post_spec(std::string_view body);   // {"text": ...} -> report

    // Takes the evaluation guard, as a running pulse would.
    std::unique_lock<std::mutex> hold_evaluation() { return std::unique_lock<std::mutex>(eval_); }

private:
    struct snapshot {
        std::string report, pulses, svg;
    };

    void publish();
    std::shared_ptr<const snapshot> current() const;

    std::mutex eval_;
    std::unique_ptr<session> session_;
    std::filesystem::path data_dir_;
    std::shared_ptr<const snapshot> snapshot_; // swapped with std::atomic_store
};

// Owns the HTTP listener for a service.
class http_server {
public:
    explicit http_server(service& svc);
    ~http_server();

    int bind(const std::string& host, int port); // port 0 picks a free one; returns the bound port
    void listen();                               // blocks until stop()
    void stop();

private:
    struct impl;
    std::unique_ptr<impl> impl_;
};

} // namespace flowlens
