//! Criterion 8 of the acceptance gate: the three documented invocations
//! emit byte-identical JSON on every run, with the documented exit codes.

use std::process::Command;

fn run(args: &[&str]) -> (Vec<u8>, i32) {
    let out = Command::new(env!("CARGO_BIN_EXE_fmckit"))
        .args(args)
        .output()
        .expect("binary runs");
    (out.stdout, out.status.code().expect("exit code present"))
}

#[test]
fn criterion_8_cli_golden_runs() {
    let cases: [(&[&str], &[u8], i32); 3] = [
        (
            &["picard", "--base-rho", "1", "--base-dim", "1", "--n", "3"],
            b"{\"picard\":4}\n",
            0,
        ),
        (
            &["aut", "--space", r#"{"fm":{"base":"P1","n":5}}"#],
            b"{\"structure\":\"S5 x PGL2\"}\n",
            0,
        ),
        (
            &["factor", "--n", "5", "--r", "4", "--I", "1,2", "--J", "3,4"],
            b"{\"verdict\":\"obstructed\"}\n",
            3,
        ),
    ];

    let outcome = std::panic::catch_unwind(|| {
        for (args, want_stdout, want_code) in cases {
            let (first, code1) = run(args);
            let (second, code2) = run(args);
            assert_eq!(first, second, "reruns of {args:?} differ");
            assert_eq!(first.as_slice(), want_stdout, "stdout of {args:?}");
            assert_eq!(code1, want_code, "exit code of {args:?}");
            assert_eq!(code2, want_code);
        }
    });
    match outcome {
        Ok(()) => println!("criterion 8 (cli golden runs): PASS"),
        Err(cause) => {
            println!("criterion 8 (cli golden runs): FAIL");
            std::panic::resume_unwind(cause);
        }
    }
}
