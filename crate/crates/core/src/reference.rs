//! Published reference values of `Q_ν(a,b)`, 15 significant digits.
//!
//! Three tables, one per `(a, b)` pair, each listing the orders in
//! [`TABLE_ORDERS`]. These are the self-test fixture for `marcumq tables`.

/// Orders `ν` of the table columns.
pub const TABLE_ORDERS: [f64; 4] = [1.0, 3.0, 5.0, 7.7];

/// `(a, b, [Q_1, Q_3, Q_5, Q_7.7])` for each table.
pub const TABLE_ROWS: [(f64, f64, [f64; 4]); 3] = [
    (0.2, 0.6, [0.838249985438908, 0.999166310455636, 0.999998670306184, 0.999999999927717]),
    (1.2, 1.6, [0.501536568390858, 0.916936068900377, 0.994346394491553, 0.999944937223540]),
    (2.2, 2.6, [0.426794627821735, 0.746459898209090, 0.929671935077756, 0.993735633182201]),
];

/// Largest accepted deviation from a tabulated value.
pub const TABLE_TOLERANCE: f64 = 1e-12;

/// All twelve entries as `(ν, a, b, Q)`, row by row.
pub fn table_entries() -> impl Iterator<Item = (f64, f64, f64, f64)> {
    TABLE_ROWS.iter().flat_map(|&(a, b, values)| {
        TABLE_ORDERS.iter().zip(values).map(move |(&nu, q)| (nu, a, b, q))
    })
}
