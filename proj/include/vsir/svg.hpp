/*
 * Copyright (C) 2026 The vsir Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace vsir::svg {

/// Fixed-format number so the same plot always serializes to the same bytes.
inline std::string num(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.2f", std::abs(v) < 5e-3 ? 0.0 : v);
    return buf;
}

inline std::string escape(const std::string& s)
{
    std::string out;
    for (char c : s) {
        switch (c) {
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '&': out += "&amp;"; break;
        case '"': out += "&quot;"; break;
        default: out += c;
        }
    }
    return out;
}

struct Style {
    std::string stroke = "#000000";
    double width = 1.0;
    std::string dash;   ///< stroke-dasharray, empty for solid
    std::string fill = "none";
};

/// A 2-D plot in data coordinates with a framed axis box.
class Plot {
public:
    Plot(double xmin, double xmax, double ymin, double ymax, int width = 640, int height = 480)
        : x0_(xmin), x1_(xmax), y0_(ymin), y1_(ymax), w_(width), h_(height)
    {
    }

    double px(double x) const { return margin_ + (x - x0_) / (x1_ - x0_) * (w_ - 2 * margin_); }
    double py(double y) const { return h_ - margin_ - (y - y0_) / (y1_ - y0_) * (h_ - 2 * margin_); }

    void polyline(const std::vector<std::pair<double, double>>& pts, const Style& st = {})
    {
        if (pts.size() < 2) return;
        std::ostringstream os;
        os << "<polyline points=\"";
        for (std::size_t i = 0; i < pts.size(); ++i) {
            if (i) os << ' ';
            os << num(clamp_x(pts[i].first)) << ',' << num(clamp_y(pts[i].second));
        }
        os << "\" " << attrs(st) << "/>";
        body_.push_back(os.str());
    }

    void circle(double x, double y, double r, const Style& st = {})
    {
        body_.push_back("<circle cx=\"" + num(px(x)) + "\" cy=\"" + num(py(y)) + "\" r=\"" + num(r) + "\" " + attrs(st)
                        + "/>");
    }

    void text(double x, double y, const std::string& s, int size = 12, const std::string& color = "#000000")
    {
        body_.push_back("<text x=\"" + num(px(x)) + "\" y=\"" + num(py(y)) + "\" font-size=\"" + std::to_string(size)
                        + "\" font-family=\"sans-serif\" fill=\"" + color + "\">" + escape(s) + "</text>");
    }

    void title(const std::string& s) { title_ = s; }
    void labels(const std::string& x, const std::string& y)
    {
        xlabel_ = x;
        ylabel_ = y;
    }
    /// Free-form comment placed right after the root element (run metadata).
    void comment(const std::string& s) { comment_ = s; }

    std::string str(int ticks = 5) const
    {
        std::ostringstream os;
        os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
        os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w_ << "\" height=\"" << h_ << "\" viewBox=\"0 0 "
           << w_ << ' ' << h_ << "\">\n";
        if (!comment_.empty()) {
            std::string c = comment_;
            for (std::size_t k = c.find("--"); k != std::string::npos; k = c.find("--", k)) c.replace(k, 2, "- -");
            os << "<!-- " << c << " -->\n";
        }
        os << "<rect x=\"0\" y=\"0\" width=\"" << w_ << "\" height=\"" << h_ << "\" fill=\"#ffffff\"/>\n";
        const double l = margin_, r = w_ - margin_, t = margin_, b = h_ - margin_;
        os << "<rect x=\"" << num(l) << "\" y=\"" << num(t) << "\" width=\"" << num(r - l) << "\" height=\""
           << num(b - t) << "\" fill=\"none\" stroke=\"#000000\"/>\n";
        for (int i = 0; i <= ticks; ++i) {
            const double xv = x0_ + (x1_ - x0_) * i / ticks;
            const double yv = y0_ + (y1_ - y0_) * i / ticks;
            os << "<line x1=\"" << num(px(xv)) << "\" y1=\"" << num(b) << "\" x2=\"" << num(px(xv)) << "\" y2=\""
               << num(b + 5) << "\" stroke=\"#000000\"/>";
            os << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(b + 18) << "\" font-size=\"10\" text-anchor=\"middle\" "
               << "font-family=\"sans-serif\">" << tick(xv) << "</text>\n";
            os << "<line x1=\"" << num(l - 5) << "\" y1=\"" << num(py(yv)) << "\" x2=\"" << num(l) << "\" y2=\""
               << num(py(yv)) << "\" stroke=\"#000000\"/>";
            os << "<text x=\"" << num(l - 8) << "\" y=\"" << num(py(yv) + 3) << "\" font-size=\"10\" text-anchor=\"end\" "
               << "font-family=\"sans-serif\">" << tick(yv) << "</text>\n";
        }
        if (!title_.empty()) {
            os << "<text x=\"" << num(w_ / 2.0) << "\" y=\"" << num(t - 16) << "\" font-size=\"14\" text-anchor=\"middle\" "
               << "font-family=\"sans-serif\">" << escape(title_) << "</text>\n";
        }
        if (!xlabel_.empty()) {
            os << "<text x=\"" << num(w_ / 2.0) << "\" y=\"" << num(h_ - 12.0) << "\" font-size=\"12\" "
               << "text-anchor=\"middle\" font-family=\"sans-serif\">" << escape(xlabel_) << "</text>\n";
        }
        if (!ylabel_.empty()) {
            os << "<text x=\"14\" y=\"" << num(h_ / 2.0) << "\" font-size=\"12\" text-anchor=\"middle\" "
               << "font-family=\"sans-serif\" transform=\"rotate(-90 14 " << num(h_ / 2.0) << ")\">" << escape(ylabel_)
               << "</text>\n";
        }
        os << "<defs><clipPath id=\"frame\"><rect x=\"" << num(l) << "\" y=\"" << num(t) << "\" width=\"" << num(r - l)
           << "\" height=\"" << num(b - t) << "\"/></clipPath></defs>\n";
        os << "<g clip-path=\"url(#frame)\">\n";
        for (const auto& e : body_) os << e << '\n';
        os << "</g>\n</svg>\n";
        return os.str();
    }

private:
    static std::string attrs(const Style& st)
    {
        std::string s = "fill=\"" + st.fill + "\" stroke=\"" + st.stroke + "\" stroke-width=\"" + num(st.width) + "\"";
        if (!st.dash.empty()) s += " stroke-dasharray=\"" + st.dash + "\"";
        return s;
    }
    static std::string tick(double v)
    {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.3g", std::abs(v) < 1e-12 ? 0.0 : v);
        return buf;
    }
    // keep far-off points finite so clipping does the work
    double clamp_x(double x) const { return std::clamp(px(x), -10.0 * w_, 11.0 * w_); }
    double clamp_y(double y) const { return std::clamp(py(y), -10.0 * h_, 11.0 * h_); }

    double x0_, x1_, y0_, y1_;
    int w_, h_;
    double margin_ = 60.0;
    std::string title_, xlabel_, ylabel_, comment_;
    std::vector<std::string> body_;
};

/// Fixed palette indexed by series number.
inline const std::string& color(std::size_t i)
{
    static const std::vector<std::string> palette{"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                                   "#8c564b", "#e377c2", "#17becf", "#7f7f7f", "#bcbd22"};
    return palette[i % palette.size()];
}

} // namespace vsir::svg
