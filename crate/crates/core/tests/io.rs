use gausscap::io::{parse_covariance, parse_modes, write_columns};
use gausscap::CapacityError;

#[test]
fn mode_tables_parse() {
    let modes = parse_modes("omega,K_abs,N\n1.0,1.0,0.0\n2.0,0.5,1.5\n", 1.0).unwrap();
    assert_eq!(modes.len(), 2);
    assert_eq!(modes[1].noise_n, 1.5);
    assert!(matches!(parse_modes("w,k,n\n1,1,0\n", 1.0), Err(CapacityError::Schema(_))));
    assert!(matches!(parse_modes("omega,K_abs,N\n1,abc,0\n", 1.0), Err(CapacityError::Schema(_))));
    assert!(parse_modes("omega,K_abs,N\n-1,1,0\n", 1.0).is_err());
}

#[test]
fn covariance_files_parse() {
    let text = "# thermal mode\ndelta,xpxp\n1.5,0\n0,1.5\n";
    let cov = parse_covariance(text).unwrap();
    assert_eq!(cov.modes(), 1);
    assert!(parse_covariance("delta,xpxp\n1,0,0\n0,1,0\n0,0,1\n").is_err());
    assert!(parse_covariance("delta,sideways\n1,0\n0,1\n").is_err());
}

#[test]
fn columns_round_trip() {
    let text = write_columns(&["a", "b"], &[vec![1.0, 0.5], vec![2.0, 0.25]]);
    assert_eq!(text, "a,b\n1,0.5\n2,0.25\n");
}
