//! Figure-regeneration configs shipped with the binary.

pub const PRESETS: &[(&str, &str)] = &[
    ("fig3b", include_str!("../presets/fig3b.conf")),
    ("fig3c", include_str!("../presets/fig3c.conf")),
    ("fig4a", include_str!("../presets/fig4a.conf")),
    ("fig4b", include_str!("../presets/fig4b.conf")),
    ("fig5a", include_str!("../presets/fig5a.conf")),
    ("fig5b", include_str!("../presets/fig5b.conf")),
    ("fig6a", include_str!("../presets/fig6a.conf")),
    ("fig6b", include_str!("../presets/fig6b.conf")),
    ("fig7a", include_str!("../presets/fig7a.conf")),
    ("fig7b", include_str!("../presets/fig7b.conf")),
    ("fig7c", include_str!("../presets/fig7c.conf")),
];

pub fn preset(name: &str) -> Option<&'static str> {
    PRESETS.iter().find(|(n, _)| *n == name).map(|(_, text)| *text)
}

pub fn names() -> impl Iterator<Item = &'static str> {
    PRESETS.iter().map(|(n, _)| *n)
}
