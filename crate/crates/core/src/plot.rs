//! Gnuplot scripts written beside CSV artifacts.

/// Script plotting columns 1:2 of a comma-separated file with a header row.
pub fn plot_script(csv_name: &str, title: &str, xlabel: &str, ylabel: &str, style: &str) -> String {
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set title '{title}'\n\
         set xlabel '{xlabel}'\n\
         set ylabel '{ylabel}'\n\
         plot '{csv_name}' using 1:2 with {style}\n"
    )
}

/// Log-log plot of columns 1:2 with a fitted power law c·x^slope overlaid.
pub fn loglog_script(csv_name: &str, title: &str, xlabel: &str, ylabel: &str, slope: f64, intercept: f64) -> String {
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set logscale xy\n\
         set title '{title}'\n\
         set xlabel '{xlabel}'\n\
         set ylabel '{ylabel}'\n\
         fit_line(x) = exp({intercept:.12e}) * x**({slope:.12e})\n\
         plot '{csv_name}' using 1:2 with linespoints, fit_line(x) title 'fit'\n"
    )
}

/// Log-log plot of columns 2.. against column 1, one curve per named column.
pub fn multi_loglog_script(csv_name: &str, title: &str, xlabel: &str, ylabel: &str, columns: usize) -> String {
    let curves: Vec<String> = (2..columns + 2)
        .map(|c| format!("'{csv_name}' using 1:{c} with linespoints"))
        .collect();
    format!(
        "set datafile separator ','\n\
         set key autotitle columnhead\n\
         set logscale xy\n\
         set title '{title}'\n\
         set xlabel '{xlabel}'\n\
         set ylabel '{ylabel}'\n\
         plot {}\n",
        curves.join(", ")
    )
}
