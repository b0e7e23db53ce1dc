#include "epdata/plot.hpp"

#include "epdata/parsers.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>

#include <fmt/core.h>
#include <png.h>

namespace epdata
{

namespace
{

struct Rgb
{
    std::uint8_t r, g, b;
};

constexpr Rgb kWhite{255, 255, 255};
constexpr Rgb kAxis{40, 40, 40};
constexpr Rgb kGrid{225, 225, 225};
constexpr Rgb kMean{200, 40, 40};
constexpr std::array<Rgb, 8> kPalette{{
    {31, 119, 180},
    {255, 127, 14},
    {44, 160, 44},
    {214, 39, 40},
    {148, 103, 189},
    {140, 86, 75},
    {227, 119, 194},
    {127, 127, 127},
}};

class Canvas
{
public:
    Canvas(int width, int height) : width_(width), height_(height), pixels_(static_cast<std::size_t>(width * height) * 3)
    {
        fill_rect(0, 0, width, height, kWhite);
    }

    int width() const { return width_; }
    int height() const { return height_; }

    void set(int x, int y, Rgb c)
    {
        if (x < 0 || y < 0 || x >= width_ || y >= height_)
        {
            return;
        }
        auto* p = &pixels_[(static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x)) * 3];
        p[0] = c.r;
        p[1] = c.g;
        p[2] = c.b;
    }

    void fill_rect(int x0, int y0, int x1, int y1, Rgb c)
    {
        for (int y = std::max(0, y0); y < std::min(height_, y1); ++y)
        {
            for (int x = std::max(0, x0); x < std::min(width_, x1); ++x)
            {
                set(x, y, c);
            }
        }
    }

    void line(int x0, int y0, int x1, int y1, Rgb c)
    {
        const int dx = std::abs(x1 - x0);
        const int dy = -std::abs(y1 - y0);
        const int sx = x0 < x1 ? 1 : -1;
        const int sy = y0 < y1 ? 1 : -1;
        int err = dx + dy;
        while (true)
        {
            set(x0, y0, c);
            if (x0 == x1 && y0 == y1)
            {
                break;
            }
            const int e2 = 2 * err;
            if (e2 >= dy)
            {
                err += dy;
                x0 += sx;
            }
            if (e2 <= dx)
            {
                err += dx;
                y0 += sy;
            }
        }
    }

    std::vector<std::uint8_t> encode() const
    {
        png_image image{};
        image.version = PNG_IMAGE_VERSION;
        image.width = static_cast<png_uint_32>(width_);
        image.height = static_cast<png_uint_32>(height_);
        image.format = PNG_FORMAT_RGB;
        png_alloc_size_t size = 0;
        if (png_image_write_to_memory(&image, nullptr, &size, 0, pixels_.data(), 0, nullptr) == 0)
        {
            const std::string message = image.message;
            png_image_free(&image);
            fail(ErrorCode::RenderFailure, fmt::format("png sizing failed: {}", message));
        }
        std::vector<std::uint8_t> out(size);
        if (png_image_write_to_memory(&image, out.data(), &size, 0, pixels_.data(), 0, nullptr) == 0)
        {
            const std::string message = image.message;
            png_image_free(&image);
            fail(ErrorCode::RenderFailure, fmt::format("png encoding failed: {}", message));
        }
        out.resize(size);
        png_image_free(&image);
        return out;
    }

private:
    int width_;
    int height_;
    std::vector<std::uint8_t> pixels_;
};

// Linear map from data space into the plot frame.
struct Frame
{
    int left, top, right, bottom;
    double x0, x1, y0, y1;

    int px(double x) const
    {
        return left + static_cast<int>(std::lround((x - x0) / (x1 - x0) * (right - left)));
    }
    int py(double y) const
    {
        return bottom - static_cast<int>(std::lround((y - y0) / (y1 - y0) * (bottom - top)));
    }
};

void widen(double& lo, double& hi)
{
    if (!(hi > lo))
    {
        const double pad = lo == 0.0 ? 0.5 : std::fabs(lo) * 0.05;
        lo -= pad;
        hi += pad;
    }
}

Frame make_frame(const Canvas& canvas, double x0, double x1, double y0, double y1)
{
    widen(x0, x1);
    widen(y0, y1);
    return Frame{50, 20, canvas.width() - 20, canvas.height() - 40, x0, x1, y0, y1};
}

void draw_axes(Canvas& canvas, const Frame& f)
{
    for (int i = 1; i < 5; ++i)
    {
        const int gx = f.left + (f.right - f.left) * i / 5;
        const int gy = f.top + (f.bottom - f.top) * i / 5;
        canvas.line(gx, f.top, gx, f.bottom, kGrid);
        canvas.line(f.left, gy, f.right, gy, kGrid);
    }
    canvas.line(f.left, f.bottom, f.right, f.bottom, kAxis);
    canvas.line(f.left, f.top, f.left, f.bottom, kAxis);
    for (int i = 0; i <= 5; ++i)
    {
        const int gx = f.left + (f.right - f.left) * i / 5;
        const int gy = f.top + (f.bottom - f.top) * i / 5;
        canvas.line(gx, f.bottom, gx, f.bottom + 5, kAxis);
        canvas.line(f.left - 5, gy, f.left, gy, kAxis);
    }
}

void draw_distribution(Canvas& canvas, const DistributionSummary& s)
{
    if (s.histogram.empty() || s.count == 0)
    {
        fail(ErrorCode::RenderFailure, "distribution payload has no bins");
    }
    std::size_t peak = 0;
    for (const auto& bin : s.histogram)
    {
        peak = std::max(peak, bin.count);
    }
    const Frame f = make_frame(canvas, s.histogram.front().lower, s.histogram.back().upper, 0.0,
                               static_cast<double>(peak) * 1.05);
    draw_axes(canvas, f);
    const int bins = static_cast<int>(s.histogram.size());
    const int span = f.right - f.left;
    for (int i = 0; i < bins; ++i)
    {
        const auto& bin = s.histogram[static_cast<std::size_t>(i)];
        // Bars are laid out by index so single-value bins still get width.
        const int x0 = f.left + span * i / bins + 1;
        const int x1 = f.left + span * (i + 1) / bins - 1;
        const int y0 = f.py(static_cast<double>(bin.count));
        canvas.fill_rect(x0, y0, std::max(x1, x0 + 1), f.bottom, kPalette[0]);
    }
    if (s.range > 0.0)
    {
        const int mx = f.left + static_cast<int>(std::lround((s.mean - s.min) / s.range * span));
        canvas.line(mx, f.top, mx, f.bottom, kMean);
    }
}

void draw_scatter(Canvas& canvas, const ScatterPayload& p)
{
    if (p.x.empty() || p.x.size() != p.y.size())
    {
        fail(ErrorCode::RenderFailure, "scatter payload has no pairs");
    }
    const auto [xmin, xmax] = std::minmax_element(p.x.begin(), p.x.end());
    const auto [ymin, ymax] = std::minmax_element(p.y.begin(), p.y.end());
    const Frame f = make_frame(canvas, *xmin, *xmax, *ymin, *ymax);
    draw_axes(canvas, f);
    for (std::size_t i = 0; i < p.x.size(); ++i)
    {
        const int cx = f.px(p.x[i]);
        const int cy = f.py(p.y[i]);
        canvas.fill_rect(cx - 2, cy - 2, cx + 3, cy + 3, kPalette[0]);
    }
}

void draw_timeseries(Canvas& canvas, const TimeseriesPayload& tables)
{
    double t0 = std::numeric_limits<double>::infinity();
    double t1 = -t0;
    double v0 = t0;
    double v1 = -t0;
    std::size_t points = 0;
    for (const auto& [name, table] : tables)
    {
        for (const auto& [entity, column] : table.columns)
        {
            for (std::size_t i = 0; i < column.size() && i < table.timestamps.size(); ++i)
            {
                if (!std::isfinite(column[i]))
                {
                    continue;
                }
                const auto t = static_cast<double>(table.timestamps[i].time_since_epoch().count());
                t0 = std::min(t0, t);
                t1 = std::max(t1, t);
                v0 = std::min(v0, column[i]);
                v1 = std::max(v1, column[i]);
                ++points;
            }
        }
    }
    if (points == 0)
    {
        fail(ErrorCode::RenderFailure, "timeseries payload has no finite points");
    }
    const Frame f = make_frame(canvas, t0, t1, v0, v1);
    draw_axes(canvas, f);
    std::size_t colour = 0;
    for (const auto& [name, table] : tables)
    {
        for (const auto& [entity, column] : table.columns)
        {
            const Rgb c = kPalette[colour++ % kPalette.size()];
            bool pen = false;
            int lx = 0;
            int ly = 0;
            for (std::size_t i = 0; i < column.size() && i < table.timestamps.size(); ++i)
            {
                if (!std::isfinite(column[i]))
                {
                    pen = false; // gaps break the line
                    continue;
                }
                const int x = f.px(static_cast<double>(table.timestamps[i].time_since_epoch().count()));
                const int y = f.py(column[i]);
                if (pen)
                {
                    canvas.line(lx, ly, x, y, c);
                }
                else
                {
                    canvas.set(x, y, c);
                }
                lx = x;
                ly = y;
                pen = true;
            }
        }
    }
}

} // namespace

std::string_view to_string(PlotKind kind)
{
    switch (kind)
    {
    case PlotKind::distribution: return "distribution";
    case PlotKind::scatter: return "scatter";
    case PlotKind::timeseries: return "timeseries";
    }
    return "distribution";
}

PlotKind parse_plot_kind(std::string_view text)
{
    const std::string key = zone_key(text);
    if (key == "DISTRIBUTION")
    {
        return PlotKind::distribution;
    }
    if (key == "SCATTER")
    {
        return PlotKind::scatter;
    }
    if (key == "TIMESERIES")
    {
        return PlotKind::timeseries;
    }
    fail(ErrorCode::InvalidRecord, fmt::format("unknown plot kind '{}'", std::string(text)));
}

std::vector<std::uint8_t> render_png(const PlotPayload& payload, PlotKind kind, PlotSize size)
{
    if (size.width < 100 || size.height < 100 || size.width > 8000 || size.height > 8000)
    {
        fail(ErrorCode::RenderFailure, fmt::format("image size {}x{} out of bounds", size.width, size.height));
    }
    Canvas canvas(size.width, size.height);
    switch (kind)
    {
    case PlotKind::distribution:
        if (const auto* s = std::get_if<DistributionSummary>(&payload))
        {
            draw_distribution(canvas, *s);
            return canvas.encode();
        }
        break;
    case PlotKind::scatter:
        if (const auto* s = std::get_if<ScatterPayload>(&payload))
        {
            draw_scatter(canvas, *s);
            return canvas.encode();
        }
        break;
    case PlotKind::timeseries:
        if (const auto* s = std::get_if<TimeseriesPayload>(&payload))
        {
            draw_timeseries(canvas, *s);
            return canvas.encode();
        }
        break;
    }
    fail(ErrorCode::RenderFailure, fmt::format("payload does not match plot kind '{}'", to_string(kind)));
}

void render_static_plot(const PlotPayload& payload, PlotKind kind, const std::filesystem::path& path, PlotSize size)
{
    const auto png = render_png(payload, kind, size);
    write_text_file(path, std::string_view(reinterpret_cast<const char*>(png.data()), png.size()));
}

} // namespace epdata
